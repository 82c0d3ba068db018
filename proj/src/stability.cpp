#include <algorithm>
#include <cmath>
#include <sstream>

#include "chsim/besov.hpp"
#include "chsim/dynamics.hpp"

namespace chsim {

StabilityTable stability_pair(const RealField& u0, const RealField& rho0, const RealField& perturbation,
                              const std::vector<double>& eps_list, const Params& params, const StepControl& ctrl,
                              double s) {
    ctrl.validate();
    const BesovIndex du_idx(s - 1.0, 2.0, 2.0);
    const BesovIndex drho_idx(s - 2.0 * params.r, 2.0, 2.0);
    const BesovIndex u_idx(s, 2.0, 2.0);
    const BesovIndex rho_idx(s - 2.0 * params.r + 1.0, 2.0, 2.0);
    const BesovIndex alpha_idx(s - 2.0 * params.r, 2.0, 2.0);

    const double pert_norm = besov_norm(perturbation, du_idx);
    if (std::abs(pert_norm - 1.0) > 1e-6) {
        std::ostringstream msg;
        msg << "perturbation must have unit B^{s-1}_{2,2} norm (got " << pert_norm << ")";
        throw ConfigError(msg.str());
    }

    const Trajectory base =
        integrate_fixed(State(0.0, u0, rho0), params, ctrl.dt_max, ctrl.t_final, ctrl.output_dt, Formulation::m_form,
                        ctrl.dealias);
    std::vector<double> base_gamma;
    for (const auto& snap : base.snapshots) {
        base_gamma.push_back(besov_norm(snap.u, u_idx) + besov_norm(snap.rho, rho_idx));
    }
    const double alpha_term = params.alpha_norm(alpha_idx);

    StabilityTable table{s, {}, {}};
    for (double eps : eps_list) {
        RealField u_pert = u0;
        u_pert.axpy(eps, perturbation);
        const Trajectory other =
            integrate_fixed(State(0.0, u_pert, rho0), params, ctrl.dt_max, ctrl.t_final, ctrl.output_dt,
                            Formulation::m_form, ctrl.dealias);
        StabilitySeries series{eps, {}, {}, {}, {}};
        StabilityRow row{eps, 0.0, 0.0};
        double integral = 0.0;
        for (std::size_t i = 0; i < base.snapshots.size(); ++i) {
            const auto& a = base.snapshots[i];
            const auto& b = other.snapshots[i];
            const double du = besov_norm(a.u - b.u, du_idx);
            const double drho = besov_norm(a.rho - b.rho, drho_idx);
            const double gamma =
                base_gamma[i] + besov_norm(b.u, u_idx) + besov_norm(b.rho, rho_idx) + alpha_term;
            if (i > 0) {
                integral += 0.5 * (gamma + series.gamma.back()) * (a.t - series.t.back());
            }
            row.sup_du = std::max(row.sup_du, du);
            row.sup_drho = std::max(row.sup_drho, drho);
            series.t.push_back(a.t);
            series.difference.push_back(du + drho);
            series.gamma.push_back(gamma);
            series.gamma_integral.push_back(integral);
        }
        table.rows.push_back(row);
        table.series.push_back(std::move(series));
    }
    return table;
}

double fit_growth_constant(const StabilitySeries& series) {
    const double d0 = series.difference.front();
    if (!(d0 > 0.0)) {
        return 0.0;
    }
    double c = 0.0;
    for (std::size_t i = 1; i < series.t.size(); ++i) {
        if (series.gamma_integral[i] > 0.0) {
            c = std::max(c, std::log(series.difference[i] / d0) / series.gamma_integral[i]);
        }
    }
    return c;
}

double growth_bound_excess(const StabilitySeries& series, double c) {
    const double d0 = series.difference.front();
    if (!(d0 > 0.0)) {
        return 0.0;
    }
    double worst = -kInfinity;
    for (std::size_t i = 0; i < series.t.size(); ++i) {
        worst = std::max(worst, std::log(series.difference[i] / d0) - c * series.gamma_integral[i]);
    }
    return worst;
}

} // namespace chsim
