#include "chsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chsim {

bool Params::alpha_vanishes() const {
    if (const double* c = std::get_if<double>(&alpha)) {
        return *c == 0.0;
    }
    return std::get<RealField>(alpha).max_abs() == 0.0;
}

double Params::alpha_norm(const BesovIndex& idx) const {
    if (const double* c = std::get_if<double>(&alpha)) {
        return std::abs(*c);
    }
    return besov_norm(std::get<RealField>(alpha), idx);
}

RealField Params::alpha_field(const Grid& grid) const {
    if (const double* c = std::get_if<double>(&alpha)) {
        return RealField(grid, std::vector<double>(grid.size(), *c));
    }
    const auto& a = std::get<RealField>(alpha);
    require_same_grid(a.grid(), grid);
    return a;
}

State::State(double t_, RealField u_, RealField rho_) : t(t_), u(std::move(u_)), rho(std::move(rho_)) {
    require_same_grid(u.grid(), rho.grid());
}

std::string to_string(Formulation f) { return f == Formulation::m_form ? "m" : "nonlocal"; }

Formulation formulation_from_string(const std::string& s) {
    if (s == "m") {
        return Formulation::m_form;
    }
    if (s == "nonlocal") {
        return Formulation::nonlocal;
    }
    throw ConfigError("unknown formulation '" + s + "' (expected m or nonlocal)");
}

void StepControl::validate() const {
    std::ostringstream msg;
    if (!(cfl > 0.0 && cfl <= 1.0)) {
        msg << "cfl=" << cfl << " must lie in (0, 1]; ";
    }
    if (!(dt_max > 0.0)) {
        msg << "dt_max=" << dt_max << " must be positive; ";
    }
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
        msg << "t_final=" << t_final << " must be finite and non-negative; ";
    }
    if (!(output_dt >= 0.0)) {
        msg << "output_dt=" << output_dt << " must be non-negative; ";
    }
    if (!(blowup_ceiling > 0.0)) {
        msg << "blowup_ceiling must be positive; ";
    }
    if (!msg.str().empty()) {
        throw ConfigError(msg.str());
    }
}

std::vector<double> StepControl::output_times() const {
    std::vector<double> times{0.0};
    if (t_final == 0.0) {
        return times;
    }
    if (output_dt > 0.0) {
        const auto count = static_cast<long>(std::floor(t_final / output_dt + 1e-9));
        for (long k = 1; k <= count; ++k) {
            const double t = static_cast<double>(k) * output_dt;
            if (t < t_final * (1.0 - 1e-12)) {
                times.push_back(t);
            }
        }
    }
    times.push_back(t_final);
    return times;
}

namespace {

[[noreturn]] void throw_nonfinite(const State& state, const char* where) {
    const double ux = derivative(state.u, 1).max_abs();
    std::ostringstream msg;
    msg << "non-finite value in " << where << " at t=" << state.t;
    throw BlowUpError(msg.str(), state.t, ux, std::nullopt, Trajectory{});
}

SpectralField maybe_dealias(SpectralField F, bool on) { return on ? dealias(std::move(F)) : F; }

RealField transport_rho_rate(const RealField& u, const RealField& ux, const RealField& rho, const RealField& rho_x,
                             double b, bool on) {
    RealField q(u.grid());
    for (std::size_t j = 0; j < q.size(); ++j) {
        q[j] = -u[j] * rho_x[j] - (b - 1.0) * ux[j] * rho[j];
    }
    return inverse_transform(maybe_dealias(transform(q), on));
}

} // namespace

Tendency rhs_m_form(const State& state, const Params& params, bool dealias_on) {
    const SpectralField U = transform(state.u);
    const SpectralField R = transform(state.rho);
    const SpectralField Ux = derivative(U, 1);
    const SpectralField M = apply_inertia(U, params.r, params.inertia_range);
    const RealField ux = inverse_transform(Ux);
    const RealField m = inverse_transform(M);
    const RealField mx = inverse_transform(derivative(M, 1));
    const RealField rx = inverse_transform(derivative(R, 1));
    const auto& u = state.u;
    const auto& rho = state.rho;

    RealField q(u.grid());
    for (std::size_t j = 0; j < q.size(); ++j) {
        q[j] = -params.b * ux[j] * m[j] - u[j] * mx[j] - params.kappa * rho[j] * rx[j];
    }
    if (!params.alpha_is_constant()) {
        const auto& a = std::get<RealField>(params.alpha);
        for (std::size_t j = 0; j < q.size(); ++j) {
            q[j] += a[j] * ux[j];
        }
    }
    SpectralField Q = maybe_dealias(transform(q), dealias_on);
    if (params.alpha_is_constant()) {
        Q.axpy(std::get<double>(params.alpha), Ux);
    }
    Tendency out{inverse_transform(invert_inertia(Q, params.r, params.inertia_range)),
                 transport_rho_rate(u, ux, rho, rx, params.b, dealias_on)};
    if (!out.du.all_finite() || !out.drho.all_finite()) {
        throw_nonfinite(state, "momentum-form right-hand side");
    }
    return out;
}

RealField nonlocal_potential(const State& state, const Params& params, bool dealias_on) {
    if (!params.alpha_is_constant()) {
        throw HypothesisError("the nonlocal form is stated for constant alpha only");
    }
    const auto& u = state.u;
    const auto& rho = state.rho;
    const RealField ux = derivative(u, 1);
    RealField q(u.grid());
    for (std::size_t j = 0; j < q.size(); ++j) {
        q[j] = 0.5 * params.b * u[j] * u[j] + 0.5 * (3.0 - params.b) * ux[j] * ux[j] +
               0.5 * params.kappa * rho[j] * rho[j];
    }
    SpectralField P = maybe_dealias(transform(q), dealias_on);
    P.axpy(-std::get<double>(params.alpha), transform(u));
    return inverse_transform(P);
}

Tendency rhs_nonlocal(const State& state, const Params& params, bool dealias_on) {
    if (params.r != 1.0) {
        std::ostringstream msg;
        msg << "the nonlocal formulation requires r = 1 (got r=" << params.r << ")";
        throw HypothesisError(msg.str());
    }
    const auto& u = state.u;
    const auto& rho = state.rho;
    const RealField ux = derivative(u, 1);
    const RealField rx = derivative(rho, 1);
    const RealField P = nonlocal_potential(state, params, dealias_on);

    SpectralField Du = maybe_dealias(transform(pointwise(u, ux)), dealias_on);
    Du *= -1.0;
    Du.axpy(-1.0, derivative(invert_inertia(transform(P), 1.0), 1));

    Tendency out{inverse_transform(Du), transport_rho_rate(u, ux, rho, rx, params.b, dealias_on)};
    if (!out.du.all_finite() || !out.drho.all_finite()) {
        throw_nonfinite(state, "nonlocal right-hand side");
    }
    return out;
}

Tendency rhs(const State& state, const Params& params, Formulation formulation, bool dealias_on) {
    return formulation == Formulation::m_form ? rhs_m_form(state, params, dealias_on)
                                              : rhs_nonlocal(state, params, dealias_on);
}

State step_rk4(const State& s, const Params& params, double dt, Formulation formulation, bool dealias_on) {
    if (!(dt > 0.0)) {
        throw ConfigError("time step must be positive");
    }
    const Tendency k1 = rhs(s, params, formulation, dealias_on);
    State s2(s.t + 0.5 * dt, RealField(s.u).axpy(0.5 * dt, k1.du), RealField(s.rho).axpy(0.5 * dt, k1.drho));
    const Tendency k2 = rhs(s2, params, formulation, dealias_on);
    State s3(s.t + 0.5 * dt, RealField(s.u).axpy(0.5 * dt, k2.du), RealField(s.rho).axpy(0.5 * dt, k2.drho));
    const Tendency k3 = rhs(s3, params, formulation, dealias_on);
    State s4(s.t + dt, RealField(s.u).axpy(dt, k3.du), RealField(s.rho).axpy(dt, k3.drho));
    const Tendency k4 = rhs(s4, params, formulation, dealias_on);

    State out(s.t + dt, s.u, s.rho);
    const double w = dt / 6.0;
    out.u.axpy(w, k1.du).axpy(2.0 * w, k2.du).axpy(2.0 * w, k3.du).axpy(w, k4.du);
    out.rho.axpy(w, k1.drho).axpy(2.0 * w, k2.drho).axpy(2.0 * w, k3.drho).axpy(w, k4.drho);
    return out;
}

namespace {

// Checks the post-step state; throws BlowUpError with the last good state on failure.
void guard_blowup(const State& next, const State& previous, double ceiling, Trajectory& traj) {
    double max_ux = 0.0;
    bool finite = next.all_finite();
    if (finite) {
        max_ux = derivative(next.u, 1).max_abs();
        finite = std::isfinite(max_ux);
    }
    if (!finite || max_ux > ceiling) {
        std::ostringstream msg;
        msg << "blow-up at t=" << next.t << ": ";
        if (finite) {
            msg << "max|u_x|=" << max_ux << " exceeds ceiling " << ceiling;
        } else {
            msg << "non-finite samples";
        }
        throw BlowUpError(msg.str(), next.t, finite ? max_ux : std::nan(""), previous, std::move(traj));
    }
}

} // namespace

Trajectory integrate(const State& initial, const Params& params, const StepControl& ctrl, Formulation formulation) {
    ctrl.validate();
    const std::vector<double> times = ctrl.output_times();
    Trajectory traj{params, formulation, ctrl.dealias, {initial}};
    const double dx = initial.grid().dx();
    State state = initial;
    std::size_t next = 1;
    while (next < times.size()) {
        double dt = std::min(ctrl.dt_max, ctrl.cfl * dx / std::max(1.0, state.u.max_abs()));
        const double remaining = times[next] - state.t;
        const bool lands = remaining <= dt * (1.0 + 1e-9);
        if (lands) {
            dt = remaining;
        }
        State advanced = step_rk4(state, params, dt, formulation, ctrl.dealias);
        guard_blowup(advanced, state, ctrl.blowup_ceiling, traj);
        state = std::move(advanced);
        if (lands) {
            state.t = times[next];
            traj.snapshots.push_back(state);
            ++next;
        }
    }
    return traj;
}

Trajectory integrate_fixed(const State& initial, const Params& params, double dt, double t_final, double output_dt,
                           Formulation formulation, bool dealias_on) {
    if (!(dt > 0.0) || !(t_final >= 0.0)) {
        throw ConfigError("fixed-step integration needs dt > 0 and t_final >= 0");
    }
    const auto steps = static_cast<long>(std::llround(t_final / dt));
    if (std::abs(static_cast<double>(steps) * dt - t_final) > 1e-9 * std::max(1.0, t_final)) {
        throw ConfigError("t_final must be an integer multiple of the fixed step");
    }
    long stride = steps;
    if (output_dt > 0.0) {
        stride = std::max(1L, static_cast<long>(std::llround(output_dt / dt)));
    }
    Trajectory traj{params, formulation, dealias_on, {initial}};
    State state = initial;
    for (long k = 1; k <= steps; ++k) {
        State advanced = step_rk4(state, params, dt, formulation, dealias_on);
        advanced.t = initial.t + static_cast<double>(k) * dt;
        guard_blowup(advanced, state, 1e6, traj);
        state = std::move(advanced);
        if (k % std::max(1L, stride) == 0 || k == steps) {
            traj.snapshots.push_back(state);
        }
    }
    return traj;
}

} // namespace chsim
