#pragma once

#include <optional>
#include <span>
#include <vector>

#include "chsim/dynamics.hpp"

namespace chsim {

/// Positions phi(t, x_i) of Lagrangian markers with their first and second
/// x-derivatives.
struct FlowMap {
    double t = 0.0;
    std::vector<double> phi;
    std::vector<double> phi_x;
    std::vector<double> phi_xx;
};

/// One FlowMap per trajectory snapshot.
struct FlowSeries {
    std::vector<double> markers;
    std::vector<FlowMap> maps;
};

/// Integrates phi_t = u(t, phi), d(phi_x)/dt = u_x(t, phi) phi_x and the matching
/// equation for phi_xx with RK4. u between snapshots is the cubic Hermite
/// interpolant built from the snapshots and their time derivatives, evaluated
/// off-grid by exact trigonometric interpolation. Markers must be strictly increasing.
FlowSeries evolve_flow(const Trajectory& traj, std::span<const double> markers, int substeps = 2);

/// max_i |rho(t, phi) phi_x^{b-1} - rho_0(x_i)| for every snapshot.
std::vector<double> check_transport_identity(const FlowSeries& flow, const Trajectory& traj, double b);

/// integral of |rho|^{1/(b-1)} by grid quadrature.
double casimir(const RealField& rho, double b);

enum class RepresentationMode {
    /// rho_0(phi^{-1}) phi_x(t, phi^{-1})^{1-b}: the exponent integrates u_x along the characteristic.
    along_characteristic,
    /// rho_0(phi^{-1}) exp((1-b) int_0^t u_x(s, x) ds) with the integral taken at the fixed point x.
    fixed_point,
};

/// Rebuilds rho on the grid at every snapshot from rho_0 and the flow.
/// The flow markers must be the grid points.
std::vector<RealField> reconstruct_rho(const FlowSeries& flow, const Trajectory& traj, double b,
                                       RepresentationMode mode = RepresentationMode::along_characteristic);

/// Inverse of the flow at one snapshot: y with phi(t, y) = x, plus phi_x(t, y).
struct FlowInverse {
    double y;
    double phi_x;
};
std::vector<FlowInverse> invert_flow(const FlowMap& map, std::span<const double> markers, double period,
                                     std::span<const double> xs);

/// Deviation in m(t, phi) phi_x^b = m_0 - kappa int_0^t rho rho_x(s, phi(s)) phi_x^b(s) ds,
/// trapezoid rule over the snapshots. Requires alpha == 0.
std::vector<double> check_m_flow_identity(const FlowSeries& flow, const Trajectory& traj);

struct SupBoundReport {
    double m1 = 0.0;  ///< max(0, sup -(b-1) u_x(t, phi)) over markers and snapshots
    /// max_t sup|rho(t)| / (exp(m1 t) sup|rho_0|), sups refined between samples
    double worst_ratio = 0.0;
    bool holds = true;
};
SupBoundReport check_sup_bound(const FlowSeries& flow, const Trajectory& traj, double b);

struct SupportInterval {
    double beta;
    double gamma;
    double threshold;
};

/// Smallest grid interval containing every sample with |f| > eps_rel * max|f|.
std::optional<SupportInterval> track_support(const RealField& field, double eps_rel = 1e-10);

struct SupportRow {
    double t = 0.0;
    std::optional<SupportInterval> rho_support;
    double rho_left = 0.0;   ///< phi(t, beta_rho) - 2 dx
    double rho_right = 0.0;  ///< phi(t, gamma_rho) + 2 dx
    bool rho_contained = true;
    bool m_checked = false;
    std::optional<SupportInterval> m_support;
    double m_left = 0.0;
    double m_right = 0.0;
    bool m_contained = true;
};

struct SupportReport {
    std::vector<SupportRow> rows;
    bool all_contained() const;
};

/// Known supports of the initial data. Missing entries are measured from the
/// t = 0 snapshot with the same relative threshold.
struct InitialSupports {
    std::optional<SupportInterval> rho;
    std::optional<SupportInterval> m;
};

/// Compares the numerical supports of rho (and of m when alpha == 0) with the
/// transported initial support. m uses beta = min(beta_m0, beta_rho0), gamma = max(...).
SupportReport check_support_containment(const Trajectory& traj, double eps_rel = 1e-10,
                                        const InitialSupports& initial = {});

} // namespace chsim
