#include "chsim/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "chsim/spectral.hpp"

namespace chsim {

namespace {

struct LineFit {
    double slope;
    double intercept;
    double rms;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    const double slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (my + slope * (x[i] - mx));
        ss += r * r;
    }
    return {slope, my - slope * mx, std::sqrt(ss / n)};
}

} // namespace

double StandardWeight::operator()(double x) const {
    if (side == WeightSide::right_only && x <= 0.0) {
        return 1.0;
    }
    const double y = std::abs(x);
    return std::exp(a * std::pow(y, b)) * std::pow(1.0 + y, c) * std::pow(std::log(std::numbers::e + y), d);
}

double StandardWeight::log_derivative(double x) const {
    if (side == WeightSide::right_only && x < 0.0) {
        return 0.0;
    }
    const double y = std::abs(x);
    const double sign = x < 0.0 ? -1.0 : 1.0;
    double slope = 0.0;
    if (a != 0.0 && b != 0.0) {
        slope += (y == 0.0 && b < 1.0) ? kInfinity : a * b * std::pow(y, b - 1.0);
    }
    slope += c / (1.0 + y);
    slope += d / ((std::numbers::e + y) * std::log(std::numbers::e + y));
    return sign * slope;
}

StandardWeight StandardWeight::sqrt() const { return {a / 2, b, c / 2, d / 2, side}; }

StandardWeight StandardWeight::companion() const {
    return {std::abs(a), std::abs(b), std::abs(c), std::abs(d), WeightSide::both};
}

bool StandardWeight::parameters_admissible() const { return a >= 0.0 && b >= 0.0 && b <= 1.0 && a * b < 1.0; }

RealField StandardWeight::sample(const Grid& grid) const {
    return RealField::from_function(grid, [this](double x) { return (*this)(x); });
}

std::string StandardWeight::describe() const {
    std::ostringstream out;
    out << "phi_{" << a << "," << b << "," << c << "," << d << "}";
    if (side == WeightSide::right_only) {
        out << "+";
    }
    return out.str();
}

std::string to_string(WeightSide side) { return side == WeightSide::both ? "both" : "right_only"; }

WeightSide weight_side_from_string(const std::string& s) {
    if (s == "both") {
        return WeightSide::both;
    }
    if (s == "right_only") {
        return WeightSide::right_only;
    }
    throw ConfigError("unknown weight side '" + s + "' (expected both or right_only)");
}

GrowthSequence companion_growth(const StandardWeight& w, double p, double l0, int doublings) {
    if (!(p >= 1.0)) {
        throw ConfigError("Lebesgue exponent must be at least 1");
    }
    const StandardWeight v = w.companion();
    const auto g = [&v](double x) { return v(x) * std::exp(-x); };
    GrowthSequence seq;
    double total = 0.0;
    double lo = 0.0;
    double hi = l0;
    for (int k = 0; k <= doublings; ++k) {
        if (std::isinf(p)) {
            const int samples = 4096;
            for (int i = 0; i <= samples; ++i) {
                total = std::max(total, g(lo + (hi - lo) * i / samples));
            }
        } else {
            // Both halves of the line carry the same integrand.
            total += 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                               [&](double x) { return std::pow(g(x), p); }, lo, hi, 15, 1e-12);
        }
        seq.half_lengths.push_back(hi);
        seq.values.push_back(total);
        lo = hi;
        hi *= 2.0;
    }
    const std::size_t n = seq.values.size();
    const double last = seq.values[n - 1];
    const double prev = seq.values[n - 2];
    seq.converged = std::isfinite(last) && last - prev <= 1e-6 * std::max(last, 1e-300);
    return seq;
}

AdmissibilityReport admissibility_check(const StandardWeight& w, const Grid& grid) {
    AdmissibilityReport rep;
    rep.parameters_ok = w.parameters_admissible();
    for (double x : grid.points()) {
        rep.growth_constant = std::max(rep.growth_constant, std::abs(w.log_derivative(x)));
    }
    rep.companion = companion_growth(w, 1.0);
    std::ostringstream why;
    if (!rep.parameters_ok) {
        why << "parameters violate a >= 0, 0 <= b <= 1, a b < 1; ";
    }
    if (!std::isfinite(rep.growth_constant)) {
        why << "phi'/phi is unbounded; ";
    }
    if (!rep.companion.converged) {
        why << "integral of v e^{-|x|} grows with L; ";
    }
    rep.reason = why.str();
    if (!rep.reason.empty()) {
        rep.reason.resize(rep.reason.size() - 2);
    }
    rep.admissible = rep.reason.empty();
    return rep;
}

bool condition_lp(const StandardWeight& w, double p) { return companion_growth(w, p).converged; }

double weighted_norm(const RealField& f, const StandardWeight& w, double p, std::optional<double> half_window) {
    if (!(p >= 1.0)) {
        throw ConfigError("Lebesgue exponent must be at least 1");
    }
    const Grid& g = f.grid();
    double acc = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double x = g.x(j);
        if (half_window && std::abs(x) > *half_window) {
            continue;
        }
        const double v = std::abs(f[j] * w(x));
        acc = std::isinf(p) ? std::max(acc, v) : acc + std::pow(v, p);
    }
    return std::isinf(p) ? acc : std::pow(acc * g.dx(), 1.0 / p);
}

double weighted_state_norm(const State& s, const StandardWeight& w, double p, std::optional<double> half_window) {
    return weighted_norm(s.u, w, p, half_window) + weighted_norm(derivative(s.u, 1), w, p, half_window) +
           weighted_norm(s.rho, w, p, half_window);
}

double sup_quantity(const State& s) { return s.u.max_abs() + derivative(s.u, 1).max_abs() + s.rho.max_abs(); }

PersistenceReport persistence_monitor(const Trajectory& traj, const StandardWeight& w, double p,
                                      std::optional<double> half_window) {
    PersistenceReport rep;
    rep.weight = w;
    rep.p = p;
    double running = 0.0;
    for (const auto& s : traj.snapshots) {
        rep.t.push_back(s.t);
        const double value = weighted_state_norm(s, w, p, half_window);
        rep.w.push_back(value);
        rep.finite = rep.finite && std::isfinite(value);
        running = std::max(running, sup_quantity(s));
        rep.m_running.push_back(running);
    }
    rep.m = running;
    rep.fit_residual.assign(rep.t.size(), 0.0);
    const double w0 = rep.w.front();
    if (!rep.finite || w0 == 0.0) {
        return rep;
    }
    const double t0 = rep.t.front();
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < rep.t.size(); ++i) {
        xs.push_back((1.0 + rep.m) * (rep.t[i] - t0));
        ys.push_back(std::log(rep.w[i] / w0));
    }
    const LineFit fit = xs.size() > 1 ? least_squares(xs, ys) : LineFit{0.0, 0.0, 0.0};
    rep.c_hat = fit.slope;
    rep.intercept = fit.intercept;
    for (std::size_t i = 0; i < rep.t.size(); ++i) {
        const double model = w0 * std::exp(fit.intercept + fit.slope * xs[i]);
        rep.fit_residual[i] = std::abs(rep.w[i] / model - 1.0);
        rep.max_residual = std::max(rep.max_residual, rep.fit_residual[i]);
        rep.bound_excess = std::max(rep.bound_excess, ys[i] - fit.slope * xs[i]);
    }
    return rep;
}

double relative_discrepancy(const PersistenceReport& a, const PersistenceReport& b) {
    if (a.w.size() != b.w.size()) {
        throw ConfigError("persistence monitors have different snapshot counts");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < a.w.size(); ++i) {
        const double scale = std::max(std::abs(a.w[i]), std::abs(b.w[i]));
        if (scale > 0.0) {
            worst = std::max(worst, std::abs(a.w[i] - b.w[i]) / scale);
        }
    }
    return worst;
}

DecayWindow default_decay_window(const Grid& grid) {
    return {0.45 * grid.half_length(), 0.7 * grid.half_length()};
}

DecayFit decay_profile(const RealField& f, const DecayWindow& window, double noise_rel) {
    const Grid& g = f.grid();
    if (!(window.lo >= 0.0 && window.lo < window.hi && window.hi <= 0.75 * g.half_length())) {
        std::ostringstream msg;
        msg << "decay window [" << window.lo << ", " << window.hi << "] must satisfy 0 <= lo < hi <= 0.75 L";
        throw ConfigError(msg.str());
    }
    const double floor = noise_rel * f.max_abs();
    std::vector<double> ax;
    std::vector<double> lx;
    std::vector<double> ly;
    bool any_nonzero = false;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double r = std::abs(g.x(j));
        if (r < window.lo || r > window.hi) {
            continue;
        }
        const double v = std::abs(f[j]);
        any_nonzero = any_nonzero || v > 0.0;
        if (v > floor) {
            ax.push_back(r);
            lx.push_back(std::log1p(r));
            ly.push_back(std::log(v));
        }
    }
    if (!any_nonzero) {
        throw FitError("decay fit window holds only zeros");
    }
    DecayFit fit;
    fit.points = ax.size();
    if (ax.size() < 4) {
        return fit;
    }
    fit.resolved = true;
    const LineFit e = least_squares(ax, ly);
    const LineFit a = least_squares(lx, ly);
    fit.exp_rate = -e.slope;
    fit.exp_residual = e.rms;
    fit.alg_rate = -a.slope;
    fit.alg_residual = a.rms;
    return fit;
}

double exp_bound_constant(const RealField& f, double half_window) {
    const Grid& g = f.grid();
    double worst = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        const double x = g.x(j);
        if (std::abs(x) <= half_window) {
            worst = std::max(worst, std::exp(std::abs(x)) * std::abs(f[j]));
        }
    }
    return worst;
}

} // namespace chsim
