#include "chsim/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chsim/spectral.hpp"

namespace chsim {

namespace {

struct FlowState {
    std::vector<double> phi;
    std::vector<double> px;
    std::vector<double> pxx;

    void axpy_from(const FlowState& base, double s, const FlowState& d) {
        for (std::size_t i = 0; i < phi.size(); ++i) {
            phi[i] = base.phi[i] + s * d.phi[i];
            px[i] = base.px[i] + s * d.px[i];
            pxx[i] = base.pxx[i] + s * d.pxx[i];
        }
    }
};

// u(t, .) between two snapshots as a cubic Hermite interpolant in time.
class VelocityHistory {
public:
    explicit VelocityHistory(const Trajectory& traj) : traj_(traj) {
        for (const auto& s : traj.snapshots) {
            values_.push_back(transform(s.u));
            rates_.push_back(transform(rhs(s, traj.params, traj.formulation, traj.dealias).du));
        }
    }

    SpectralField at(std::size_t j, double theta) const {
        const double dt = traj_.snapshots[j + 1].t - traj_.snapshots[j].t;
        const double t2 = theta * theta;
        const double t3 = t2 * theta;
        SpectralField c = values_[j];
        c *= 2 * t3 - 3 * t2 + 1;
        c.axpy((t3 - 2 * t2 + theta) * dt, rates_[j]);
        c.axpy(-2 * t3 + 3 * t2, values_[j + 1]);
        c.axpy((t3 - t2) * dt, rates_[j + 1]);
        return c;
    }

private:
    const Trajectory& traj_;
    std::vector<SpectralField> values_;
    std::vector<SpectralField> rates_;
};

FlowState flow_rate(const SpectralField& u, const FlowState& s) {
    const auto jets = TrigInterpolant(u).jets(s.phi);
    FlowState d{std::vector<double>(s.phi.size()), std::vector<double>(s.phi.size()),
                std::vector<double>(s.phi.size())};
    for (std::size_t i = 0; i < s.phi.size(); ++i) {
        d.phi[i] = jets[i].value;
        d.px[i] = jets[i].d1 * s.px[i];
        d.pxx[i] = jets[i].d2 * s.px[i] * s.px[i] + jets[i].d1 * s.pxx[i];
    }
    return d;
}

void check_flow(const FlowState& s, double t) {
    for (std::size_t i = 0; i < s.phi.size(); ++i) {
        if (!(s.px[i] > 0.0) || !std::isfinite(s.phi[i])) {
            std::ostringstream msg;
            msg << "flow map degenerate at t=" << t << ": phi_x=" << s.px[i] << " at marker " << i;
            throw FlowDegeneracyError(msg.str(), t);
        }
        if (i > 0 && !(s.phi[i] > s.phi[i - 1])) {
            std::ostringstream msg;
            msg << "flow map lost monotonicity at t=" << t << " between markers " << i - 1 << " and " << i;
            throw FlowDegeneracyError(msg.str(), t);
        }
    }
}

void require_aligned(const FlowSeries& flow, const Trajectory& traj) {
    if (flow.maps.size() != traj.snapshots.size()) {
        throw ConfigError("flow series and trajectory have different snapshot counts");
    }
}

} // namespace

FlowSeries evolve_flow(const Trajectory& traj, std::span<const double> markers, int substeps) {
    if (substeps < 1) {
        throw ConfigError("flow substeps must be positive");
    }
    for (std::size_t i = 1; i < markers.size(); ++i) {
        if (!(markers[i] > markers[i - 1])) {
            throw ConfigError("flow markers must be strictly increasing");
        }
    }
    const std::size_t count = markers.size();
    FlowState state{std::vector<double>(markers.begin(), markers.end()), std::vector<double>(count, 1.0),
                    std::vector<double>(count, 0.0)};
    FlowSeries out{std::vector<double>(markers.begin(), markers.end()), {}};
    out.maps.push_back({traj.snapshots.front().t, state.phi, state.px, state.pxx});
    if (traj.snapshots.size() < 2) {
        return out;
    }

    const VelocityHistory history(traj);
    FlowState tmp = state;
    for (std::size_t j = 0; j + 1 < traj.snapshots.size(); ++j) {
        const double t0 = traj.snapshots[j].t;
        const double span = traj.snapshots[j + 1].t - t0;
        const double h = span / substeps;
        for (int sub = 0; sub < substeps; ++sub) {
            const double th = static_cast<double>(sub) / substeps;
            const double dth = 1.0 / substeps;
            const FlowState k1 = flow_rate(history.at(j, th), state);
            tmp.axpy_from(state, 0.5 * h, k1);
            const SpectralField mid = history.at(j, th + 0.5 * dth);
            const FlowState k2 = flow_rate(mid, tmp);
            tmp.axpy_from(state, 0.5 * h, k2);
            const FlowState k3 = flow_rate(mid, tmp);
            tmp.axpy_from(state, h, k3);
            const FlowState k4 = flow_rate(history.at(j, th + dth), tmp);
            for (std::size_t i = 0; i < count; ++i) {
                state.phi[i] += h / 6 * (k1.phi[i] + 2 * k2.phi[i] + 2 * k3.phi[i] + k4.phi[i]);
                state.px[i] += h / 6 * (k1.px[i] + 2 * k2.px[i] + 2 * k3.px[i] + k4.px[i]);
                state.pxx[i] += h / 6 * (k1.pxx[i] + 2 * k2.pxx[i] + 2 * k3.pxx[i] + k4.pxx[i]);
            }
        }
        const double t1 = traj.snapshots[j + 1].t;
        check_flow(state, t1);
        out.maps.push_back({t1, state.phi, state.px, state.pxx});
    }
    return out;
}

std::vector<double> check_transport_identity(const FlowSeries& flow, const Trajectory& traj, double b) {
    require_aligned(flow, traj);
    const auto rho0 = TrigInterpolant(transform(traj.initial().rho)).values(flow.markers);
    std::vector<double> devs;
    for (std::size_t j = 0; j < flow.maps.size(); ++j) {
        const FlowMap& map = flow.maps[j];
        if (j == 0) {
            devs.push_back(0.0);
            continue;
        }
        const auto rho = TrigInterpolant(transform(traj.snapshots[j].rho)).values(map.phi);
        double worst = 0.0;
        for (std::size_t i = 0; i < rho.size(); ++i) {
            worst = std::max(worst, std::abs(rho[i] * std::pow(map.phi_x[i], b - 1.0) - rho0[i]));
        }
        devs.push_back(worst);
    }
    return devs;
}

double casimir(const RealField& rho, double b) {
    if (b == 1.0) {
        throw DomainError("the Casimir exponent 1/(b-1) is undefined for b = 1");
    }
    const double e = 1.0 / (b - 1.0);
    double sum = 0.0;
    for (double v : rho.samples()) {
        const double a = std::abs(v);
        if (a > 0.0) {
            sum += std::pow(a, e);
        }
    }
    return sum * rho.grid().dx();
}

std::vector<FlowInverse> invert_flow(const FlowMap& map, std::span<const double> markers, double period,
                                     std::span<const double> xs) {
    const std::size_t n = markers.size();
    if (n < 2) {
        throw ConfigError("flow inversion needs at least two markers");
    }
    // Periodic images close the map: phi(x + 2L) = phi(x) + 2L.
    std::vector<double> y(n + 2), p(n + 2), d(n + 2), dd(n + 2);
    y[0] = markers[n - 1] - period;
    p[0] = map.phi[n - 1] - period;
    d[0] = map.phi_x[n - 1];
    dd[0] = map.phi_xx[n - 1];
    for (std::size_t i = 0; i < n; ++i) {
        y[i + 1] = markers[i];
        p[i + 1] = map.phi[i];
        d[i + 1] = map.phi_x[i];
        dd[i + 1] = map.phi_xx[i];
    }
    y[n + 1] = markers[0] + period;
    p[n + 1] = map.phi[0] + period;
    d[n + 1] = map.phi_x[0];
    dd[n + 1] = map.phi_xx[0];

    std::vector<FlowInverse> out;
    out.reserve(xs.size());
    for (double x0 : xs) {
        // Shift the target into the span covered by the extended node set.
        double x = x0;
        double shift = 0.0;
        while (x < p.front()) {
            x += period;
            shift -= period;
        }
        while (x >= p.back()) {
            x -= period;
            shift += period;
        }
        const auto it = std::upper_bound(p.begin(), p.end(), x);
        const std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(1, it - p.begin())) - 1;
        const double h = y[i + 1] - y[i];
        const double secant = (p[i + 1] - p[i]) / h;
        // Fritsch-Carlson limiter on the exact slopes keeps the cubic monotone.
        double m0 = d[i];
        double m1 = d[i + 1];
        const double a = m0 / secant;
        const double bb = m1 / secant;
        if (a * a + bb * bb > 9.0) {
            const double tau = 3.0 / std::sqrt(a * a + bb * bb);
            m0 = tau * a * secant;
            m1 = tau * bb * secant;
        }
        auto cubic = [&](double s, double& value, double& slope) {
            const double s2 = s * s;
            const double s3 = s2 * s;
            value = (2 * s3 - 3 * s2 + 1) * p[i] + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * p[i + 1] +
                    (s3 - s2) * h * m1;
            slope = ((6 * s2 - 6 * s) * p[i] + (3 * s2 - 4 * s + 1) * h * m0 + (-6 * s2 + 6 * s) * p[i + 1] +
                     (3 * s2 - 2 * s) * h * m1) /
                    h;
        };
        // Safeguarded Newton on s in [0, 1].
        double lo = 0.0;
        double hi = 1.0;
        double s = (x - p[i]) / (p[i + 1] - p[i]);
        for (int iter = 0; iter < 60; ++iter) {
            double value = 0.0;
            double slope = 0.0;
            cubic(s, value, slope);
            const double f = value - x;
            if (f > 0.0) {
                hi = s;
            } else {
                lo = s;
            }
            if (std::abs(f) < 1e-15 * std::max(1.0, std::abs(x))) {
                break;
            }
            double next = s - f / (slope * h);
            if (!(next > lo && next < hi)) {
                next = 0.5 * (lo + hi);
            }
            if (std::abs(next - s) < 1e-16) {
                s = next;
                break;
            }
            s = next;
        }
        // phi_x at the preimage from the Hermite cubic with slopes phi_xx.
        const double s2 = s * s;
        const double s3 = s2 * s;
        const double px = (2 * s3 - 3 * s2 + 1) * d[i] + (s3 - 2 * s2 + s) * h * dd[i] +
                          (-2 * s3 + 3 * s2) * d[i + 1] + (s3 - s2) * h * dd[i + 1];
        out.push_back({y[i] + s * h + shift, px});
    }
    return out;
}

std::vector<RealField> reconstruct_rho(const FlowSeries& flow, const Trajectory& traj, double b,
                                       RepresentationMode mode) {
    require_aligned(flow, traj);
    const Grid& g = traj.grid();
    const auto xs = g.points();
    if (flow.markers.size() != xs.size() || !std::equal(xs.begin(), xs.end(), flow.markers.begin())) {
        throw ConfigError("reconstruct_rho needs the grid points as flow markers");
    }
    const TrigInterpolant rho0(transform(traj.initial().rho));
    const double period = 2.0 * g.half_length();

    std::vector<RealField> out;
    std::vector<double> fixed_integral(xs.size(), 0.0);
    RealField prev_ux = derivative(traj.initial().u, 1);
    for (std::size_t j = 0; j < flow.maps.size(); ++j) {
        if (j == 0) {
            out.push_back(traj.initial().rho);
            continue;
        }
        const auto inv = invert_flow(flow.maps[j], flow.markers, period, xs);
        std::vector<double> ys(inv.size());
        for (std::size_t i = 0; i < inv.size(); ++i) {
            ys[i] = inv[i].y;
        }
        const auto base = rho0.values(ys);
        RealField rec(g);
        if (mode == RepresentationMode::along_characteristic) {
            for (std::size_t i = 0; i < xs.size(); ++i) {
                rec[i] = base[i] * std::pow(inv[i].phi_x, 1.0 - b);
            }
        } else {
            const RealField ux = derivative(traj.snapshots[j].u, 1);
            const double dt = traj.snapshots[j].t - traj.snapshots[j - 1].t;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                fixed_integral[i] += 0.5 * dt * (ux[i] + prev_ux[i]);
                rec[i] = base[i] * std::exp((1.0 - b) * fixed_integral[i]);
            }
            prev_ux = ux;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<double> check_m_flow_identity(const FlowSeries& flow, const Trajectory& traj) {
    require_aligned(flow, traj);
    const Params& params = traj.params;
    if (!params.alpha_vanishes()) {
        throw HypothesisError("the m-flow identity holds only for alpha identically zero");
    }
    const double b = params.b;
    const auto m_at = [&](std::size_t j, std::span<const double> pts) {
        return TrigInterpolant(apply_inertia(transform(traj.snapshots[j].u), params.r, params.inertia_range))
            .values(pts);
    };
    const auto m0 = m_at(0, flow.markers);

    std::vector<double> integral(flow.markers.size(), 0.0);
    std::vector<double> prev_source(flow.markers.size(), 0.0);
    std::vector<double> devs;
    for (std::size_t j = 0; j < flow.maps.size(); ++j) {
        const FlowMap& map = flow.maps[j];
        const auto rho_jets = TrigInterpolant(transform(traj.snapshots[j].rho)).jets(map.phi);
        std::vector<double> source(map.phi.size());
        for (std::size_t i = 0; i < source.size(); ++i) {
            source[i] = rho_jets[i].value * rho_jets[i].d1 * std::pow(map.phi_x[i], b);
        }
        if (j == 0) {
            prev_source = source;
            devs.push_back(0.0);
            continue;
        }
        const double dt = map.t - flow.maps[j - 1].t;
        const auto m = m_at(j, map.phi);
        double worst = 0.0;
        for (std::size_t i = 0; i < source.size(); ++i) {
            integral[i] += 0.5 * dt * (source[i] + prev_source[i]);
            const double lhs = m[i] * std::pow(map.phi_x[i], b);
            worst = std::max(worst, std::abs(lhs - m0[i] + params.kappa * integral[i]));
        }
        prev_source = std::move(source);
        devs.push_back(worst);
    }
    return devs;
}

namespace {

// Sampled maxima miss off-grid peaks by O(dx^2); refine around the largest sample.
double refined_sup(const RealField& f) {
    std::size_t arg = 0;
    for (std::size_t j = 1; j < f.size(); ++j) {
        if (std::abs(f[j]) > std::abs(f[arg])) {
            arg = j;
        }
    }
    if (f[arg] == 0.0) {
        return 0.0;
    }
    const Grid& g = f.grid();
    const int samples = 64;
    std::vector<double> xs;
    for (int i = 0; i <= samples; ++i) {
        xs.push_back(g.x(arg) + g.dx() * (2.0 * i / samples - 1.0));
    }
    double best = std::abs(f[arg]);
    for (double v : TrigInterpolant(transform(f)).values(xs)) {
        best = std::max(best, std::abs(v));
    }
    return best;
}

} // namespace

SupBoundReport check_sup_bound(const FlowSeries& flow, const Trajectory& traj, double b) {
    require_aligned(flow, traj);
    SupBoundReport report;
    for (std::size_t j = 0; j < flow.maps.size(); ++j) {
        const auto jets = TrigInterpolant(transform(traj.snapshots[j].u)).jets(flow.maps[j].phi);
        for (const auto& jet : jets) {
            report.m1 = std::max(report.m1, -(b - 1.0) * jet.d1);
        }
    }
    const double rho0 = refined_sup(traj.initial().rho);
    for (std::size_t j = 0; j < flow.maps.size(); ++j) {
        const double bound = std::exp(report.m1 * (traj.snapshots[j].t - traj.initial().t)) * rho0;
        const double value = refined_sup(traj.snapshots[j].rho);
        if (bound > 0.0) {
            report.worst_ratio = std::max(report.worst_ratio, value / bound);
        }
        if (value > bound * (1.0 + 1e-10) + 1e-14) {
            report.holds = false;
        }
    }
    return report;
}

std::optional<SupportInterval> track_support(const RealField& field, double eps_rel) {
    const double thr = eps_rel * field.max_abs();
    std::optional<std::size_t> first;
    std::size_t last = 0;
    for (std::size_t j = 0; j < field.size(); ++j) {
        if (std::abs(field[j]) > thr) {
            if (!first) {
                first = j;
            }
            last = j;
        }
    }
    if (!first) {
        return std::nullopt;
    }
    const Grid& g = field.grid();
    return SupportInterval{g.x(*first), g.x(last), thr};
}

bool SupportReport::all_contained() const {
    return std::all_of(rows.begin(), rows.end(), [](const SupportRow& r) { return r.rho_contained && r.m_contained; });
}

SupportReport check_support_containment(const Trajectory& traj, double eps_rel, const InitialSupports& initial) {
    const Grid& g = traj.grid();
    const double dx = g.dx();
    const Params& params = traj.params;
    const auto m_of = [&](const State& s) { return apply_inertia(s.u, params.r, params.inertia_range); };

    const auto rho_supp0 = initial.rho ? initial.rho : track_support(traj.initial().rho, eps_rel);
    const bool check_m = params.alpha_vanishes();
    std::optional<SupportInterval> m_supp0;
    if (check_m) {
        m_supp0 = initial.m ? initial.m : track_support(m_of(traj.initial()), eps_rel);
    }

    std::vector<double> markers;
    if (rho_supp0) {
        markers.push_back(rho_supp0->beta);
        markers.push_back(rho_supp0->gamma);
    }
    double m_beta = 0.0;
    double m_gamma = 0.0;
    if (m_supp0) {
        m_beta = m_supp0->beta;
        m_gamma = m_supp0->gamma;
        if (rho_supp0) {
            m_beta = std::min(m_beta, rho_supp0->beta);
            m_gamma = std::max(m_gamma, rho_supp0->gamma);
        }
        markers.push_back(m_beta);
        markers.push_back(m_gamma);
    }
    std::sort(markers.begin(), markers.end());
    markers.erase(std::unique(markers.begin(), markers.end()), markers.end());

    SupportReport report;
    if (markers.empty()) {
        for (const auto& s : traj.snapshots) {
            SupportRow row;
            row.t = s.t;
            report.rows.push_back(row);
        }
        return report;
    }
    const FlowSeries flow = evolve_flow(traj, markers);
    const auto phi_of = [&](std::size_t j, double marker) {
        const auto it = std::lower_bound(markers.begin(), markers.end(), marker);
        return flow.maps[j].phi[static_cast<std::size_t>(it - markers.begin())];
    };

    for (std::size_t j = 0; j < traj.snapshots.size(); ++j) {
        const State& s = traj.snapshots[j];
        SupportRow row;
        row.t = s.t;
        if (rho_supp0) {
            row.rho_support = track_support(s.rho, eps_rel);
            row.rho_left = phi_of(j, rho_supp0->beta) - 2 * dx;
            row.rho_right = phi_of(j, rho_supp0->gamma) + 2 * dx;
            row.rho_contained = !row.rho_support ||
                                (row.rho_support->beta >= row.rho_left && row.rho_support->gamma <= row.rho_right);
        }
        if (m_supp0) {
            row.m_checked = true;
            row.m_support = track_support(m_of(s), eps_rel);
            row.m_left = phi_of(j, m_beta) - 2 * dx;
            row.m_right = phi_of(j, m_gamma) + 2 * dx;
            row.m_contained =
                !row.m_support || (row.m_support->beta >= row.m_left && row.m_support->gamma <= row.m_right);
        }
        report.rows.push_back(row);
    }
    return report;
}

} // namespace chsim
