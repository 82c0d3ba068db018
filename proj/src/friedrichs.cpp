#include <algorithm>
#include <cmath>

#include "chsim/besov.hpp"
#include "chsim/dynamics.hpp"

namespace chsim {

namespace {

// Coefficient fields of the previous iterate, stored on a uniform time grid.
class FrozenCoefficients {
public:
    FrozenCoefficients(const Trajectory& prev, double h) : prev_(prev), h_(h) {}

    State at(double t) const {
        const auto& snaps = prev_.snapshots;
        const double pos = (t - snaps.front().t) / h_;
        const auto nearest = static_cast<long>(std::llround(pos));
        const auto last = static_cast<long>(snaps.size()) - 1;
        if (std::abs(pos - static_cast<double>(nearest)) < 1e-9) {
            return snaps[static_cast<std::size_t>(std::clamp(nearest, 0L, last))];
        }
        // Cubic Lagrange through the four surrounding samples.
        long first = static_cast<long>(std::floor(pos)) - 1;
        first = std::clamp(first, 0L, std::max(0L, last - 3));
        const long count = std::min(4L, last + 1);
        RealField u(snaps.front().grid());
        RealField rho(snaps.front().grid());
        for (long a = 0; a < count; ++a) {
            double w = 1.0;
            for (long c = 0; c < count; ++c) {
                if (c != a) {
                    w *= (pos - static_cast<double>(first + c)) / static_cast<double>(a - c);
                }
            }
            const auto& s = snaps[static_cast<std::size_t>(first + a)];
            u.axpy(w, s.u);
            rho.axpy(w, s.rho);
        }
        return State(t, std::move(u), std::move(rho));
    }

private:
    const Trajectory& prev_;
    double h_;
};

// Linear system with coefficients (u_k, rho_k) frozen:
//   m_t = -u_k d_x m + alpha d_x u_k - b d_x u_k m_k - kappa rho_k d_x rho_k
//   rho_t = -u_k d_x rho - (b - 1) d_x u_k rho_k
Tendency linear_rhs(const State& unknown, const State& coeff, const Params& params, bool dealias_on) {
    const SpectralField Uc = transform(coeff.u);
    const SpectralField Ucx = derivative(Uc, 1);
    const RealField uc = coeff.u;
    const RealField ucx = inverse_transform(Ucx);
    const RealField mc = inverse_transform(apply_inertia(Uc, params.r, params.inertia_range));
    const RealField rc = coeff.rho;
    const RealField rcx = derivative(coeff.rho, 1);

    const SpectralField Un = transform(unknown.u);
    const RealField mnx = inverse_transform(derivative(apply_inertia(Un, params.r, params.inertia_range), 1));
    const RealField rnx = derivative(unknown.rho, 1);

    RealField q(uc.grid());
    RealField q2(uc.grid());
    for (std::size_t j = 0; j < q.size(); ++j) {
        q[j] = -uc[j] * mnx[j] - params.b * ucx[j] * mc[j] - params.kappa * rc[j] * rcx[j];
        q2[j] = -uc[j] * rnx[j] - (params.b - 1.0) * ucx[j] * rc[j];
    }
    if (!params.alpha_is_constant()) {
        const auto& a = std::get<RealField>(params.alpha);
        for (std::size_t j = 0; j < q.size(); ++j) {
            q[j] += a[j] * ucx[j];
        }
    }
    SpectralField Q = transform(q);
    SpectralField Q2 = transform(q2);
    if (dealias_on) {
        Q = dealias(std::move(Q));
        Q2 = dealias(std::move(Q2));
    }
    if (params.alpha_is_constant()) {
        Q.axpy(std::get<double>(params.alpha), Ucx);
    }
    return {inverse_transform(invert_inertia(Q, params.r, params.inertia_range)), inverse_transform(Q2)};
}

State linear_step(const State& s, const FrozenCoefficients& coeffs, const Params& params, double dt,
                  bool dealias_on) {
    const State c0 = coeffs.at(s.t);
    const State ch = coeffs.at(s.t + 0.5 * dt);
    const State c1 = coeffs.at(s.t + dt);
    const Tendency k1 = linear_rhs(s, c0, params, dealias_on);
    const State s2(s.t + 0.5 * dt, RealField(s.u).axpy(0.5 * dt, k1.du), RealField(s.rho).axpy(0.5 * dt, k1.drho));
    const Tendency k2 = linear_rhs(s2, ch, params, dealias_on);
    const State s3(s.t + 0.5 * dt, RealField(s.u).axpy(0.5 * dt, k2.du), RealField(s.rho).axpy(0.5 * dt, k2.drho));
    const Tendency k3 = linear_rhs(s3, ch, params, dealias_on);
    const State s4(s.t + dt, RealField(s.u).axpy(dt, k3.du), RealField(s.rho).axpy(dt, k3.drho));
    const Tendency k4 = linear_rhs(s4, c1, params, dealias_on);
    State out(s.t + dt, s.u, s.rho);
    const double w = dt / 6.0;
    out.u.axpy(w, k1.du).axpy(2.0 * w, k2.du).axpy(2.0 * w, k3.du).axpy(w, k4.du);
    out.rho.axpy(w, k1.drho).axpy(2.0 * w, k2.drho).axpy(2.0 * w, k3.drho).axpy(w, k4.drho);
    return out;
}

} // namespace

std::vector<Trajectory> friedrichs_iterate(const RealField& u0, const RealField& rho0, const Params& params,
                                           int iterations, const StepControl& ctrl) {
    if (iterations < 1) {
        throw ConfigError("Friedrichs iteration count must be at least 1");
    }
    ctrl.validate();
    require_same_grid(u0.grid(), rho0.grid());
    const double h = ctrl.dt_max;
    const auto steps = static_cast<long>(std::llround(ctrl.t_final / h));
    if (steps < 1 || std::abs(static_cast<double>(steps) * h - ctrl.t_final) > 1e-9 * std::max(1.0, ctrl.t_final)) {
        throw ConfigError("Friedrichs iteration needs t_final to be a positive multiple of dt_max");
    }

    const Grid& g = u0.grid();
    std::vector<Trajectory> iterates;
    iterates.reserve(static_cast<std::size_t>(iterations) + 1);
    Trajectory zero{params, Formulation::m_form, ctrl.dealias, {}};
    for (long j = 0; j <= steps; ++j) {
        zero.snapshots.emplace_back(static_cast<double>(j) * h, RealField(g), RealField(g));
    }
    iterates.push_back(std::move(zero));

    for (int k = 1; k <= iterations; ++k) {
        const FrozenCoefficients coeffs(iterates.back(), h);
        State state(0.0, low_pass(u0, k), low_pass(rho0, k));
        Trajectory traj{params, Formulation::m_form, ctrl.dealias, {state}};
        for (long j = 1; j <= steps; ++j) {
            state = linear_step(state, coeffs, params, h, ctrl.dealias);
            state.t = static_cast<double>(j) * h;
            if (!state.all_finite()) {
                throw BlowUpError("non-finite Friedrichs iterate", state.t, std::nan(""), std::nullopt,
                                  std::move(traj));
            }
            traj.snapshots.push_back(state);
        }
        iterates.push_back(std::move(traj));
    }
    return iterates;
}

} // namespace chsim
