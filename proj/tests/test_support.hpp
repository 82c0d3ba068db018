#pragma once

// Shared generators and independent quadrature oracles for the test suites.

#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "chsim/field.hpp"
#include "chsim/spectral.hpp"

namespace chsim::testing {

/// Real field with random coefficients on modes 1 <= |k| <= k_max (plus a mean).
inline RealField random_band_limited(const Grid& grid, long k_max, std::mt19937_64& rng, double decay = 0.0) {
    std::normal_distribution<double> normal(0.0, 1.0);
    SpectralField F(grid);
    F[0] = normal(rng);
    for (long k = 1; k <= k_max; ++k) {
        const double scale = std::exp(-decay * static_cast<double>(k));
        const Complex c(normal(rng) * scale, normal(rng) * scale);
        F[static_cast<std::size_t>(k)] = c;
        F[grid.size() - static_cast<std::size_t>(k)] = std::conj(c);
    }
    return inverse_transform(F);
}

/// Largest mode index that survives the two-thirds rule.
inline long dealias_limit(const Grid& grid) { return static_cast<long>(grid.size() / 3); }

inline double max_abs_diff(const RealField& a, const RealField& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        m = std::max(m, std::abs(a[j] - b[j]));
    }
    return m;
}

/// Composite 8-point Gauss-Legendre on [a, b] with the given number of panels.
inline double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels) {
    static constexpr std::array<double, 4> nodes{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                                 0.9602898564975363};
    static constexpr std::array<double, 4> weights{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                   0.1012285362903763};
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        const double half = 0.5 * h;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            sum += weights[i] * (f(mid - half * nodes[i]) + f(mid + half * nodes[i]));
        }
    }
    return sum * 0.5 * h;
}

} // namespace chsim::testing
