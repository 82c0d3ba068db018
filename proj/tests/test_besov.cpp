#include <cmath>
#include <numbers>
#include <random>

#include "chsim/besov.hpp"
#include "chsim/spectral.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace chsim;
using chsim::testing::max_abs_diff;
using chsim::testing::random_band_limited;

namespace {
const double pi = std::numbers::pi;

RealField sum_blocks(const DyadicDecomposition& dec) {
    RealField total(dec.blocks.front().grid());
    for (const auto& b : dec.blocks) {
        total += b;
    }
    return total;
}
} // namespace

TEST_CASE("index validation") {
    CHECK_NOTHROW(BesovIndex(1.0, 1.0, kInfinity));
    CHECK_THROWS_AS(BesovIndex(1.0, 0.5, 2.0), ConfigError);
    CHECK_THROWS_AS(BesovIndex(1.0, 2.0, 0.0), ConfigError);
    CHECK_THROWS_AS(BesovIndex(kInfinity, 2.0, 2.0), ConfigError);
}

TEST_CASE("decomposition of zero and of a single mode") {
    const Grid g(pi, 64);
    const DyadicDecomposition zero = lp_decompose(RealField(g));
    CHECK(zero.k_max() == 5);
    for (const auto& b : zero.blocks) {
        CHECK(b.max_abs() == 0.0);
    }

    const auto s4 = RealField::from_function(g, [](double x) { return std::sin(4 * x); });
    const DyadicDecomposition dec = lp_decompose(s4, CutoffStyle::sharp);
    for (int k = -1; k <= dec.k_max(); ++k) {
        if (k == 2) {
            CHECK(max_abs_diff(dec.block(k), s4) < 1e-14);
        } else {
            CHECK(dec.block(k).max_abs() < 1e-14);
        }
    }
}

TEST_CASE("partition of unity and block supports") {
    std::mt19937_64 rng(17);
    const Grid g(20.0, 512);
    for (auto style : {CutoffStyle::sharp, CutoffStyle::smooth}) {
        const auto [c1, c2] = annulus_constants(style);
        for (int trial = 0; trial < 5; ++trial) {
            const RealField f = random_band_limited(g, 255, rng);
            const DyadicDecomposition dec = lp_decompose(f, style);
            CHECK(max_abs_diff(sum_blocks(dec), f) < 1e-10 * f.max_abs());
            for (int k = 0; k <= dec.k_max(); ++k) {
                const SpectralField B = transform(dec.block(k));
                for (std::size_t i = 0; i < B.size(); ++i) {
                    const double xi = std::abs(g.wavenumber(i));
                    if (xi < std::ldexp(c1, k) * (1 - 1e-12) || xi > std::ldexp(c2, k) * (1 + 1e-12)) {
                        CHECK(std::abs(B[i]) < 1e-13 * f.max_abs());
                    }
                }
            }
        }
    }
    // Multipliers sum to one at every wavenumber up to the grid's Nyquist.
    for (auto style : {CutoffStyle::sharp, CutoffStyle::smooth}) {
        for (double xi = 0.0; xi <= g.nyquist(); xi += 0.173) {
            double sum = 0.0;
            for (int k = -1; k <= dyadic_k_max(g); ++k) {
                sum += block_multiplier(style, k, xi);
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
        }
    }
}

TEST_CASE("low-pass operator") {
    const Grid g(pi, 64);
    const auto f = RealField::from_function(g, [](double x) { return std::sin(x) + std::sin(3 * x) + std::sin(9 * x); });
    const auto expect = RealField::from_function(g, [](double x) { return std::sin(x) + std::sin(3 * x); });
    CHECK(max_abs_diff(low_pass(f, 2), expect) < 1e-14);
    CHECK(low_pass(f, 0).max_abs() < 1e-14);
}

TEST_CASE("single-mode Besov scaling") {
    const Grid g(pi, 128);
    const auto s4 = RealField::from_function(g, [](double x) { return std::sin(4 * x); });
    const auto s8 = RealField::from_function(g, [](double x) { return std::sin(8 * x); });
    CHECK(besov_norm(RealField(g), BesovIndex(2.0, 2.0, 2.0)) == 0.0);
    for (double s : {-1.0, 0.5, 1.0, 2.5}) {
        for (double p : {1.0, 2.0, 3.0, kInfinity}) {
            for (double q : {1.0, 2.0, kInfinity}) {
                const BesovIndex idx(s, p, q);
                const double n4 = besov_norm(s4, idx);
                CHECK(std::abs(n4 - std::exp2(2 * s) * lp_norm(s4, p)) < 1e-10 * n4);
                // Grid sums of |sin|^p depend on samples per period unless p is 2 or infinity.
                if (p == 2.0 || std::isinf(p)) {
                    CHECK(std::abs(besov_norm(s8, idx) / n4 - std::exp2(s)) < 1e-10 * std::exp2(s));
                }
            }
        }
    }
}

TEST_CASE("B^s_{2,2} is equivalent to H^s with fixed constants") {
    // Per-mode ratio 2^{2ks}/(1+xi^2)^s for the sharp annuli lies in
    // [min(2^{-3s}, 5^{-s}), 1] whenever s >= 0.
    std::mt19937_64 rng(23);
    const Grid g(20.0, 256);
    for (double s : {0.5, 1.5, 3.0}) {
        const double lo = std::min(std::exp2(-3 * s), std::pow(5.0, -s));
        double min_ratio = kInfinity;
        double max_ratio = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            const RealField f = random_band_limited(g, 85, rng, 0.03);
            const double b = besov_norm(f, BesovIndex(s, 2.0, 2.0));
            const double h = sobolev_norm(f, s);
            const double ratio = b * b / (h * h);
            min_ratio = std::min(min_ratio, ratio);
            max_ratio = std::max(max_ratio, ratio);
        }
        CHECK(min_ratio >= lo);
        CHECK(max_ratio <= 1.0 + 1e-12);
    }
}

TEST_CASE("Sobolev norm") {
    std::mt19937_64 rng(31);
    const Grid g(20.0, 256);
    const RealField f = random_band_limited(g, 80, rng, 0.02);
    CHECK(std::abs(sobolev_norm(f, 0.0) - l2_norm(f)) < 1e-12 * l2_norm(f));

    const Grid p(pi, 64);
    const auto s2 = RealField::from_function(p, [](double x) { return std::sin(2 * x); });
    for (double s : {0.0, 1.0, 2.0}) {
        CHECK(sobolev_norm(s2, s) == doctest::Approx(std::sqrt(pi) * std::pow(5.0, s / 2)).epsilon(1e-13));
    }

    const RealField fx = derivative(f, 1);
    const double h1 = sobolev_norm(f, 1.0);
    const double l2 = l2_norm(f);
    const double l2x = l2_norm(fx);
    CHECK(std::abs(h1 * h1 - (l2 * l2 + l2x * l2x)) < 1e-10 * h1 * h1);
}

TEST_CASE("norm properties on random fields") {
    std::mt19937_64 rng(37);
    const Grid g(20.0, 256);
    const BesovIndex idx(1.5, 2.0, 1.0);
    const BesovIndex weaker(0.5, 2.0, 1.0);
    double max_embedding_ratio = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const RealField f = random_band_limited(g, 85, rng, 0.02);
        const RealField h = random_band_limited(g, 85, rng, 0.02);
        const double nf = besov_norm(f, idx);
        CHECK(std::abs(besov_norm(-3.5 * f, idx) - 3.5 * nf) < 1e-12 * 3.5 * nf);
        CHECK(besov_norm(f + h, idx) <= nf + besov_norm(h, idx) + 1e-12 * nf);
        for (auto style : {CutoffStyle::sharp, CutoffStyle::smooth}) {
            const double inf_norm = besov_norm(f, BesovIndex(1.0, kInfinity, kInfinity), style);
            CHECK(inf_norm > 0.0);
        }
        max_embedding_ratio = std::max(max_embedding_ratio, besov_norm(f, weaker) / nf);
    }
    // For s' < s only the low-pass block can gain, by at most 2^{s-s'}.
    CHECK(max_embedding_ratio <= std::exp2(1.0) + 1e-12);
}

TEST_CASE("embedding chain H^s -> B^{2r+1/2}_{2,1} -> H^{2r+1/2}") {
    std::mt19937_64 rng(41);
    const Grid g(20.0, 256);
    const double r = 1.0;
    const double crit = 2 * r + 0.5;
    const double s = crit + 1.0;
    double min_upper = kInfinity;
    double max_upper = 0.0;
    double min_lower = kInfinity;
    double max_lower = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
        const RealField f = random_band_limited(g, 85, rng, 0.05);
        const double hs = sobolev_norm(f, s);
        const double b21 = besov_norm(f, BesovIndex(crit, 2.0, 1.0));
        const double hcrit = sobolev_norm(f, crit);
        min_upper = std::min(min_upper, hs / b21);
        max_upper = std::max(max_upper, hs / b21);
        min_lower = std::min(min_lower, b21 / hcrit);
        max_lower = std::max(max_lower, b21 / hcrit);
    }
    // Constants are stable: both ratios stay in a bounded band away from zero.
    CHECK(min_upper > 0.05);
    CHECK(max_upper / min_upper < 50.0);
    CHECK(min_lower >= std::sqrt(std::min(std::exp2(-3 * crit), std::pow(5.0, -crit))));
    CHECK(max_lower < 20.0);
}
