#include <cmath>

#include "chsim/profiles.hpp"
#include "chsim/weights.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace chsim;
using chsim::testing::gauss_legendre;

TEST_CASE("standard weight evaluation") {
    const StandardWeight one;
    CHECK(one(0.0) == 1.0);
    CHECK(one(-7.5) == 1.0);
    const StandardWeight poly{0, 0, 2, 0};
    CHECK(poly(3.0) == doctest::Approx(16.0));
    CHECK(poly(-3.0) == doctest::Approx(16.0));
    const StandardWeight right{0.9, 1, 0, 0, WeightSide::right_only};
    CHECK(right(-4.0) == 1.0);
    CHECK(right(2.0) == doctest::Approx(std::exp(1.8)));
    const StandardWeight mixed{0.3, 0.5, 1.5, 2.0};
    for (double x : {-3.0, 0.0, 0.7, 12.0}) {
        const double h = mixed.sqrt()(x);
        CHECK(h * h == doctest::Approx(mixed(x)).epsilon(1e-13));
        CHECK(mixed(x) > 0.0);
    }
    CHECK(to_string(WeightSide::right_only) == "right_only");
    CHECK(weight_side_from_string("both") == WeightSide::both);
    CHECK_THROWS_AS(weight_side_from_string("left"), ConfigError);
}

TEST_CASE("log derivative against finite differences") {
    const StandardWeight w{0.4, 1.0, 2.0, 1.5};
    for (double x : {-5.0, -0.3, 0.8, 9.0}) {
        const double h = 1e-6;
        const double fd = (std::log(w(x + h)) - std::log(w(x - h))) / (2 * h);
        CHECK(w.log_derivative(x) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("admissibility") {
    const Grid g(20.0, 512);
    const AdmissibilityReport trivial = admissibility_check(StandardWeight{}, g);
    CHECK(trivial.admissible);
    CHECK(trivial.growth_constant == 0.0);

    const AdmissibilityReport poly = admissibility_check(StandardWeight{0, 0, 2, 0}, g);
    CHECK(poly.admissible);
    CHECK(poly.growth_constant == doctest::Approx(2.0).epsilon(1e-14));

    const AdmissibilityReport right = admissibility_check(StandardWeight{0.9, 1, 0, 0, WeightSide::right_only}, g);
    CHECK(right.admissible);
    CHECK(right.growth_constant == doctest::Approx(0.9));

    // v e^{-|x|} = 1 for phi_{1,1,0,0}: the integral grows like 2L.
    const StandardWeight critical{1, 1, 0, 0};
    const AdmissibilityReport crit = admissibility_check(critical, g);
    CHECK_FALSE(crit.admissible);
    CHECK_FALSE(crit.parameters_ok);
    CHECK_FALSE(crit.companion.converged);
    const auto& seq = crit.companion;
    for (std::size_t i = 0; i < seq.values.size(); ++i) {
        CHECK(seq.values[i] == doctest::Approx(2.0 * seq.half_lengths[i]).epsilon(1e-10));
    }
    CHECK(condition_lp(critical, kInfinity));
    CHECK_FALSE(condition_lp(critical, 2.0));
    CHECK(condition_lp(StandardWeight{0.5, 1, 0, 0}, 2.0));

    const AdmissibilityReport sub = admissibility_check(StandardWeight{1.0, 0.5, 0, 0}, g);
    CHECK(sub.parameters_ok);
    CHECK_FALSE(std::isfinite(sub.growth_constant));
    CHECK_FALSE(sub.admissible);
}

TEST_CASE("weighted norms") {
    const Grid g(20.0, 1024);
    const RealField gauss = Profile::gaussian(1.0, 2.0).sample(g);
    CHECK(std::abs(weighted_norm(gauss, StandardWeight{}, 2.0) - l2_norm(gauss)) < 1e-12 * l2_norm(gauss));

    const auto decay = RealField::from_function(g, [](double x) { return std::exp(-std::abs(x)); });
    CHECK(weighted_norm(decay, StandardWeight{0.5, 1, 0, 0}, kInfinity) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(exp_bound_constant(decay, 15.0) == doctest::Approx(1.0).epsilon(1e-12));

    const double w = 3.0;
    // Off-centre so the weight's kink at 0 lies outside the support.
    const RealField bump = Profile::bump(1.0, w, 5.0).sample(g);
    const double oracle = gauss_legendre(
        [w](double x) { return smooth_bump(x - 5.0, w) * (1 + x) * (1 + x); }, 5.0 - w, 5.0 + w, 400);
    CHECK(std::abs(weighted_norm(bump, StandardWeight{0, 0, 2, 0}, 1.0) - oracle) < 1e-8);

    // Pointwise larger weights give larger norms.
    const RealField wave = RealField::from_function(g, [](double x) { return std::sin(x) * std::exp(-0.1 * x * x); });
    for (double p : {1.0, 2.0, kInfinity}) {
        double prev = 0.0;
        for (double c : {0.0, 1.0, 2.0, 3.0}) {
            const double n = weighted_norm(wave, StandardWeight{0, 0, c, 0}, p);
            CHECK(n >= prev);
            prev = n;
        }
        CHECK(weighted_norm(wave, StandardWeight{0, 0, 2, 0}, p, 5.0) <= weighted_norm(wave, StandardWeight{0, 0, 2, 0}, p));
    }
    CHECK_THROWS_AS(weighted_norm(wave, StandardWeight{}, 0.5), ConfigError);
}

TEST_CASE("persistence monitor") {
    const Grid g(20.0, 512);
    StepControl ctrl;
    ctrl.t_final = 1.0;
    ctrl.output_dt = 0.1;
    const Params params;

    const Trajectory zero = integrate(State(0.0, RealField(g), RealField(g)), params, ctrl);
    const PersistenceReport z = persistence_monitor(zero, StandardWeight{0, 0, 3, 0}, kInfinity);
    for (double v : z.w) {
        CHECK(v == 0.0);
    }

    const State s(0.0, Profile::gaussian(0.5, 1.5).sample(g), Profile::gaussian(0.5, 2.0, 1.0).sample(g));
    const Trajectory traj = integrate(s, params, ctrl);
    for (const StandardWeight& w : {StandardWeight{0, 0, 3, 0}, StandardWeight{0.9, 1, 0, 0, WeightSide::right_only}}) {
        for (double p : {1.0, 2.0, kInfinity}) {
            const PersistenceReport rep = persistence_monitor(traj, w, p);
            CHECK(rep.finite);
            CHECK(rep.w.size() == traj.snapshots.size());
            CHECK(rep.max_residual < 0.05);
            CHECK(rep.m_running.back() == rep.m);
            CHECK(rep.m >= sup_quantity(traj.initial()));
            CHECK(relative_discrepancy(rep, rep) == 0.0);
        }
    }
}

TEST_CASE("decay profile") {
    const Grid g(40.0, 2048);
    const DecayWindow win = default_decay_window(g);
    CHECK(win.lo == doctest::Approx(18.0));
    CHECK(win.hi == doctest::Approx(28.0));

    const auto expo = RealField::from_function(g, [](double x) { return std::exp(-0.5 * std::abs(x)); });
    const DecayFit fe = decay_profile(expo, win);
    CHECK(fe.resolved);
    CHECK(fe.exp_rate == doctest::Approx(0.5).epsilon(0.04));
    CHECK(fe.exp_residual < 1e-10);

    const RealField flat(g, std::vector<double>(g.size(), 2.0));
    const DecayFit ff = decay_profile(flat, win);
    CHECK(std::abs(ff.exp_rate) < 1e-12);
    CHECK(std::abs(ff.alg_rate) < 1e-12);

    const auto alg = RealField::from_function(g, [](double x) { return std::pow(1 + std::abs(x), -3.0); });
    const DecayFit fa = decay_profile(alg, win);
    CHECK(fa.alg_rate == doctest::Approx(3.0).epsilon(0.03));

    CHECK_THROWS_AS(decay_profile(RealField(g), win), FitError);
    CHECK_THROWS_AS(decay_profile(expo, DecayWindow{10.0, 35.0}), ConfigError);
    CHECK_THROWS_AS(decay_profile(expo, DecayWindow{20.0, 10.0}), ConfigError);

    // A Gaussian tail in the window sits far below the floor.
    const DecayFit fg = decay_profile(Profile::gaussian(1.0, 1.5).sample(g), win);
    CHECK_FALSE(fg.resolved);
}
