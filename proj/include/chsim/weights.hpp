#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chsim/dynamics.hpp"

namespace chsim {

enum class WeightSide { both, right_only };

/// phi_{a,b,c,d}(x) = exp(a |x|^b) (1 + |x|)^c log(e + |x|)^d.
/// right_only sets phi = 1 for x <= 0.
struct StandardWeight {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    WeightSide side = WeightSide::both;

    double operator()(double x) const;
    /// phi'(x) / phi(x); one-sided limit from the right at x = 0.
    double log_derivative(double x) const;
    /// phi^{1/2} = phi_{a/2, b, c/2, d/2} on the same side.
    StandardWeight sqrt() const;
    /// Two-sided phi_{|a|,|b|,|c|,|d|}, the sub-multiplicative companion v.
    StandardWeight companion() const;
    /// a >= 0, 0 <= b <= 1, a b < 1.
    bool parameters_admissible() const;
    RealField sample(const Grid& grid) const;
    std::string describe() const;
};

std::string to_string(WeightSide side);
WeightSide weight_side_from_string(const std::string& s);

/// Integral of (v e^{-|x|})^p over [-L, L] for a doubling sequence of L.
/// p = infinity tracks the sup instead.
struct GrowthSequence {
    std::vector<double> half_lengths;
    std::vector<double> values;
    bool converged = false;
};
GrowthSequence companion_growth(const StandardWeight& w, double p, double l0 = 20.0, int doublings = 4);

struct AdmissibilityReport {
    bool parameters_ok = false;
    /// Smallest A with |phi'| <= A phi on the sample points.
    double growth_constant = 0.0;
    GrowthSequence companion;  ///< p = 1
    bool admissible = false;
    std::string reason;
};
AdmissibilityReport admissibility_check(const StandardWeight& w, const Grid& grid);

/// v e^{-|x|} in L^p, the relaxed hypothesis used for a single p.
bool condition_lp(const StandardWeight& w, double p);

/// ||f phi||_{L^p} by grid quadrature (max for p = infinity), optionally restricted to |x| <= half_window.
double weighted_norm(const RealField& f, const StandardWeight& w, double p,
                     std::optional<double> half_window = std::nullopt);

/// ||u phi|| + ||u_x phi|| + ||rho phi|| in L^p.
double weighted_state_norm(const State& s, const StandardWeight& w, double p,
                           std::optional<double> half_window = std::nullopt);

/// ||u||_inf + ||u_x||_inf + ||rho||_inf.
double sup_quantity(const State& s);

struct PersistenceReport {
    StandardWeight weight;
    double p = 2.0;
    std::vector<double> t;
    std::vector<double> w;          ///< W_p(t)
    std::vector<double> m_running;  ///< running max of sup_quantity
    double m = 0.0;
    /// Affine least-squares fit log(W/W0) ~ intercept + c_hat (1 + M) t.
    double c_hat = 0.0;
    double intercept = 0.0;
    /// |W / (W0 exp(intercept + c_hat (1 + M) t)) - 1| per snapshot.
    std::vector<double> fit_residual;
    double max_residual = 0.0;
    /// max_t [log(W/W0) - c_hat (1 + M) t]; the slack the fitted bound needs.
    double bound_excess = 0.0;
    bool finite = true;
};
PersistenceReport persistence_monitor(const Trajectory& traj, const StandardWeight& w, double p,
                                      std::optional<double> half_window = std::nullopt);

/// Largest relative difference between two monitors of the same quantity.
double relative_discrepancy(const PersistenceReport& a, const PersistenceReport& b);

struct DecayWindow {
    double lo;
    double hi;
};
/// |x| in [0.45 L, 0.7 L].
DecayWindow default_decay_window(const Grid& grid);

struct DecayFit {
    /// False when every window sample sits below the noise floor.
    bool resolved = false;
    double exp_rate = 0.0;  ///< a in |f| ~ e^{-a |x|}
    double alg_rate = 0.0;  ///< c in |f| ~ (1 + |x|)^{-c}
    double exp_residual = 0.0;
    double alg_residual = 0.0;
    std::size_t points = 0;
};
/// Least-squares fits of log|f| on both tails of the window. Samples below
/// noise_rel * max|f| are dropped.
DecayFit decay_profile(const RealField& f, const DecayWindow& window, double noise_rel = 1e-12);

/// max e^{|x|} |f(x)| over |x| <= half_window.
double exp_bound_constant(const RealField& f, double half_window);

} // namespace chsim
