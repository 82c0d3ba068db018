#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chsim/besov.hpp"
#include "chsim/field.hpp"
#include "chsim/spectral.hpp"

namespace chsim {

/// Model constants of m_t = alpha u_x - b u_x m - u m_x - kappa rho rho_x,
/// rho_t = -u rho_x - (b-1) u_x rho, m = (1 - d_xx)^r u.
struct Params {
    double b = 2.0;
    double kappa = 1.0;
    /// Constant or time-independent field.
    std::variant<double, RealField> alpha = 0.0;
    double r = 1.0;
    InertiaRange inertia_range = InertiaRange::standard;

    bool alpha_is_constant() const { return std::holds_alternative<double>(alpha); }
    /// True when alpha is the constant 0 or a field of zeros.
    bool alpha_vanishes() const;
    /// |c| for a constant, the given Besov norm for a field.
    double alpha_norm(const BesovIndex& idx) const;
    RealField alpha_field(const Grid& grid) const;
};

struct State {
    double t = 0.0;
    RealField u;
    RealField rho;

    State(double t_, RealField u_, RealField rho_);
    const Grid& grid() const { return u.grid(); }
    bool all_finite() const { return u.all_finite() && rho.all_finite(); }
};

enum class Formulation { m_form, nonlocal };

std::string to_string(Formulation f);
Formulation formulation_from_string(const std::string& s);

struct StepControl {
    double cfl = 0.3;
    double dt_max = 1e-2;
    double t_final = 1.0;
    /// Snapshot spacing; 0 records only t = 0 and t_final.
    double output_dt = 0.0;
    bool dealias = true;
    /// max |u_x| above this aborts the run as blow-up.
    double blowup_ceiling = 1e6;

    void validate() const;
    std::vector<double> output_times() const;
};

struct Trajectory {
    Params params;
    Formulation formulation = Formulation::m_form;
    bool dealias = true;
    std::vector<State> snapshots;

    const Grid& grid() const { return snapshots.front().grid(); }
    const State& initial() const { return snapshots.front(); }
    const State& final() const { return snapshots.back(); }
};

/// Finite-time gradient blow-up or NaN. Carries the last finite state and
/// the snapshots recorded so far.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(const std::string& what, double t, double max_ux, std::optional<State> last, Trajectory partial)
        : std::runtime_error(what), time(t), max_abs_ux(max_ux), last_valid(std::move(last)),
          partial(std::move(partial)) {}

    double time;
    double max_abs_ux;
    std::optional<State> last_valid;
    Trajectory partial;
};

struct Tendency {
    RealField du;
    RealField drho;
};

/// Momentum form: returns (A^{-1} m_t, rho_t); every product is dealiased when requested.
Tendency rhs_m_form(const State& state, const Params& params, bool dealias = true);

/// P(u, rho) = b/2 u^2 + (3-b)/2 u_x^2 + kappa/2 rho^2 - alpha u, products dealiased.
RealField nonlocal_potential(const State& state, const Params& params, bool dealias = true);

/// u_t = -u u_x - d_x G*P(u, rho). Requires r = 1 and constant alpha.
Tendency rhs_nonlocal(const State& state, const Params& params, bool dealias = true);

Tendency rhs(const State& state, const Params& params, Formulation formulation, bool dealias = true);

State step_rk4(const State& state, const Params& params, double dt, Formulation formulation, bool dealias = true);

/// dt = min(dt_max, cfl dx / max(1, max|u|)) clipped to land on snapshot times.
Trajectory integrate(const State& initial, const Params& params, const StepControl& ctrl,
                     Formulation formulation = Formulation::m_form);

/// Fixed-step variant used by refinement studies: exactly t_final/dt steps.
Trajectory integrate_fixed(const State& initial, const Params& params, double dt, double t_final,
                           double output_dt, Formulation formulation = Formulation::m_form, bool dealias = true);

/// Frozen-coefficient linear transport iterates. Result[0] is the zero iterate;
/// result[k] for k >= 1 starts from S_k u0, S_k rho0 and has the coefficients of result[k-1].
/// Uses a fixed step ctrl.dt_max and records every step.
std::vector<Trajectory> friedrichs_iterate(const RealField& u0, const RealField& rho0, const Params& params,
                                           int iterations, const StepControl& ctrl);

struct StabilityRow {
    double eps;
    double sup_du;    ///< sup_t ||u1 - u2||_{B^{s-1}_{2,2}}
    double sup_drho;  ///< sup_t ||rho1 - rho2||_{B^{s-2r}_{2,2}}
};

struct StabilitySeries {
    double eps;
    std::vector<double> t;
    std::vector<double> difference;  ///< ||u12||_{B^{s-1}} + ||rho12||_{B^{s-2r}}
    std::vector<double> gamma;       ///< Gamma_s(t)
    std::vector<double> gamma_integral;
};

struct StabilityTable {
    double s;
    std::vector<StabilityRow> rows;
    std::vector<StabilitySeries> series;
};

/// Paired runs from (u0, rho0) and (u0 + eps pert, rho0); pert must have unit B^{s-1}_{2,2} norm.
StabilityTable stability_pair(const RealField& u0, const RealField& rho0, const RealField& perturbation,
                              const std::vector<double>& eps_list, const Params& params, const StepControl& ctrl,
                              double s);

/// Smallest C with difference(t) <= difference(0) exp(C int_0^t Gamma) over the series (never negative).
double fit_growth_constant(const StabilitySeries& series);
/// max_t [log(difference(t)/difference(0)) - C int_0^t Gamma]; non-positive when the bound holds.
double growth_bound_excess(const StabilitySeries& series, double c);

} // namespace chsim
