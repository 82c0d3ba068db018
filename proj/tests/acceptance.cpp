// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "chsim/characteristics.hpp"
#include "chsim/harness.hpp"
#include "chsim/profiles.hpp"
#include "chsim/suites.hpp"
#include "test_support.hpp"

using namespace chsim;
using chsim::testing::dealias_limit;
using chsim::testing::max_abs_diff;
using chsim::testing::random_band_limited;

namespace {

// Tolerances.
constexpr double kFormulationTol = 1e-10;
constexpr double kCasimirTol = 1e-6;
constexpr double kCasimirShrink = 8.0;
constexpr double kCasimirFloor = 1e-12;
constexpr double kIdentityTol = 1e-4;
constexpr double kBesovTol = 1e-10;

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out{false, ""};
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2d %-34s %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", id, name, out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.pass ? 0 : 1;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

State gaussian_state(const Grid& g, double ua = 0.8, double offset = 0.0) {
    Profile rho = Profile::gaussian(0.5, 2.0, 1.0);
    rho.offset = offset;
    return State(0.0, Profile::gaussian(ua, 1.5).sample(g), rho.sample(g));
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, x);
    }
    return m;
}

Outcome suite_checks(const std::string& suite, const std::vector<std::string>& checks) {
    const SuiteReport rep = run_suite(suite, 4);
    bool pass = true;
    std::string detail;
    for (const auto& name : checks) {
        const SuiteCheck& c = rep.check(name);
        pass = pass && c.pass;
        detail += (detail.empty() ? "" : "; ") + name + " " + fmt(c.measured) + " vs " + fmt(c.tolerance);
    }
    return {pass, detail};
}

Outcome formulation_equivalence() {
    std::mt19937_64 rng(2024);
    const Grid g(20.0, 256);
    Params p;
    p.alpha = 0.3;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const State s(0.0, random_band_limited(g, dealias_limit(g), rng, 0.05),
                      random_band_limited(g, dealias_limit(g), rng, 0.05));
        const Tendency a = rhs_m_form(s, p);
        const Tendency b = rhs_nonlocal(s, p);
        const double scale = std::max(a.du.max_abs(), a.drho.max_abs());
        worst = std::max(worst, std::max(max_abs_diff(a.du, b.du), max_abs_diff(a.drho, b.drho)) / scale);
    }
    return {worst < kFormulationTol, "relative sup difference " + fmt(worst) + " over 20 states"};
}

double casimir_drift(double b, double dt) {
    const Grid g(20.0, 1024);
    Params p;
    p.b = b;
    const Trajectory traj = integrate_fixed(gaussian_state(g, 0.8, b == 3.0 ? 0.2 : 0.0), p, dt, 1.0, 0.1);
    const double c0 = casimir(traj.initial().rho, b);
    double worst = 0.0;
    for (const auto& s : traj.snapshots) {
        worst = std::max(worst, std::abs(casimir(s.rho, b) - c0) / c0);
    }
    return worst;
}

Outcome casimir_conservation() {
    bool pass = true;
    std::string detail;
    for (double b : {2.0, 3.0}) {
        const double coarse = casimir_drift(b, 0.02);
        const double fine = casimir_drift(b, 0.01);
        const bool shrinks = coarse / fine >= kCasimirShrink || coarse < kCasimirFloor;
        pass = pass && fine < kCasimirTol && coarse < kCasimirTol && shrinks;
        detail += "b=" + fmt(b) + ": " + fmt(coarse) + " -> " + fmt(fine) + (coarse < kCasimirFloor ? " (roundoff) " : " ");
    }
    return {pass, detail};
}

Trajectory fixed(const Grid& g, double dt, double t_final, double output_dt, double ua = 0.8) {
    return integrate_fixed(gaussian_state(g, ua), Params{}, dt, t_final, output_dt);
}

Outcome transport_identity() {
    double devs[2];
    double at_zero = 0.0;
    int i = 0;
    for (std::size_t n : {512, 1024}) {
        const Grid g(20.0, n);
        const Trajectory traj = fixed(g, 0.01, 1.0, 0.01);
        const auto dev = check_transport_identity(evolve_flow(traj, g.points()), traj, 2.0);
        devs[i++] = max_of(dev);
        at_zero = std::max(at_zero, dev.front());
    }
    const bool pass = devs[1] < kIdentityTol && devs[1] < devs[0] && at_zero == 0.0;
    return {pass, "n=512 " + fmt(devs[0]) + ", n=1024 " + fmt(devs[1]) + ", t=0 " + fmt(at_zero)};
}

Outcome representation_formula() {
    const Grid g(20.0, 1024);
    const Trajectory traj = fixed(g, 0.01, 0.5, 0.01);
    const auto rebuilt = reconstruct_rho(evolve_flow(traj, g.points()), traj, 2.0);
    const double err = max_abs_diff(rebuilt.back(), traj.final().rho);
    return {err < kIdentityTol, "sup error at t=" + fmt(traj.final().t) + ": " + fmt(err)};
}

Outcome m_flow_identity() {
    const Grid g(20.0, 1024);
    double devs[2];
    int i = 0;
    for (double dt : {0.01, 0.005}) {
        const Trajectory traj = fixed(g, dt, 1.0, dt);
        devs[i++] = max_of(check_m_flow_identity(evolve_flow(traj, g.points()), traj));
    }
    return {devs[1] < kIdentityTol && devs[1] < devs[0],
            "dt=0.01 " + fmt(devs[0]) + ", dt=0.005 " + fmt(devs[1])};
}

Outcome besov_machinery() {
    const double pi = std::acos(-1.0);
    // Single modes sit in one dyadic block, so the norm is 2^{ks} times the L^p norm.
    const Grid gp(pi, 128);
    double scaling = 0.0;
    const auto s4 = RealField::from_function(gp, [](double x) { return std::sin(4 * x); });
    const auto s8 = RealField::from_function(gp, [](double x) { return std::sin(8 * x); });
    for (double s : {-1.0, 0.5, 2.5}) {
        for (double q : {1.0, 2.0, kInfinity}) {
            const BesovIndex idx(s, 2.0, q);
            const double n4 = besov_norm(s4, idx);
            scaling = std::max(scaling, std::abs(n4 - std::exp2(2 * s) * lp_norm(s4, 2.0)) / n4);
            scaling = std::max(scaling, std::abs(besov_norm(s8, idx) / n4 - std::exp2(s)) / std::exp2(s));
        }
    }

    std::mt19937_64 rng(99);
    const Grid g(20.0, 256);
    const double s = 1.5;
    const double c1 = std::min(std::exp2(-3 * s), std::pow(5.0, -s));
    const double c2 = 1.0;
    double lo = kInfinity;
    double hi = 0.0;
    double recon = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const RealField f = random_band_limited(g, 85, rng, 0.03);
        const double b = besov_norm(f, BesovIndex(s, 2.0, 2.0));
        const double h = sobolev_norm(f, s);
        lo = std::min(lo, b * b / (h * h));
        hi = std::max(hi, b * b / (h * h));
        for (auto style : {CutoffStyle::sharp, CutoffStyle::smooth}) {
            const DyadicDecomposition dec = lp_decompose(f, style);
            RealField sum(g);
            for (const auto& block : dec.blocks) {
                sum += block;
            }
            recon = std::max(recon, max_abs_diff(sum, f) / f.max_abs());
        }
    }
    const bool pass = scaling < kBesovTol && lo >= c1 && hi <= c2 + 1e-12 && recon < kBesovTol;
    return {pass, "scaling " + fmt(scaling) + ", ratio in [" + fmt(lo) + ", " + fmt(hi) + "] within [" + fmt(c1) +
                      ", " + fmt(c2) + "], reconstruction " + fmt(recon)};
}

} // namespace

int main() {
    criterion(1, "formulation equivalence", formulation_equivalence);
    criterion(2, "casimir conservation", casimir_conservation);
    criterion(3, "transport identity", transport_identity);
    criterion(4, "representation formula", representation_formula);
    criterion(5, "m-flow identity", m_flow_identity);
    criterion(6, "support containment", [] { return suite_checks("support", {"supports of rho and m contained"}); });
    criterion(7, "continuous dependence", [] {
        return suite_checks("stability",
                            {"difference linear in eps", "fitted constant validates on held-out data"});
    });
    criterion(8, "friedrichs iteration", [] { return suite_checks("friedrichs", {"contraction ratio for k=2..6"}); });
    criterion(9, "weighted persistence", [] {
        return suite_checks("persistence", {"affine log-growth fit residual", "L-doubling stability",
                                            "exponential-weight quantities finite"});
    });
    criterion(10, "exponential decay persistence",
              [] { return suite_checks("persistence", {"exponential tail rate"}); });
    criterion(11, "besov machinery", besov_machinery);
    criterion(12, "convergence",
              [] { return suite_checks("convergence", {"spatial error drop per doubling", "temporal order deviation from 4"}); });
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
