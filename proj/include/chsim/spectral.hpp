#pragma once

#include <array>
#include <span>
#include <vector>

#include "chsim/field.hpp"

namespace chsim {

/// Whether inertia exponents below 1 are accepted. The model assumes r >= 1.
enum class InertiaRange { standard, exploratory };

SpectralField transform(const RealField& f);
/// Real part of the synthesis sum; the imaginary part is discarded.
RealField inverse_transform(const SpectralField& F);

/// Multiplier (i xi)^order. The Nyquist mode is zeroed for odd orders.
SpectralField derivative(const SpectralField& F, int order);
RealField derivative(const RealField& f, int order);

/// m = (1 - d_xx)^r u, multiplier (1 + xi^2)^r.
SpectralField apply_inertia(const SpectralField& F, double r, InertiaRange range = InertiaRange::standard);
RealField apply_inertia(const RealField& f, double r, InertiaRange range = InertiaRange::standard);

/// u = (1 - d_xx)^{-r} m, multiplier (1 + xi^2)^{-r}.
SpectralField invert_inertia(const SpectralField& F, double r, InertiaRange range = InertiaRange::standard);
RealField invert_inertia(const RealField& f, double r, InertiaRange range = InertiaRange::standard);

/// Convolution with G(x) = exp(-|x|)/2, i.e. (1 - d_xx)^{-1}.
RealField helmholtz_convolve(const RealField& f);

/// Two-thirds rule: zero every mode with |xi| > (2/3) xi_nyquist.
SpectralField dealias(SpectralField F);
bool dealias_keeps(const Grid& grid, std::size_t i);

/// Pointwise product, transformed and truncated by the two-thirds rule.
SpectralField dealiased_product(const RealField& a, const RealField& b);

/// sqrt(sum_j |f_j|^2 dx)
double l2_norm(const RealField& f);

/// Exact trigonometric interpolation of a SpectralField at arbitrary points.
/// Odd-order derivatives drop the Nyquist mode, even orders treat it as a cosine.
class TrigInterpolant {
public:
    explicit TrigInterpolant(const SpectralField& F);

    double operator()(double x) const;

    /// Values of the 0th, 1st and 2nd derivative at each point.
    struct Jet {
        double value;
        double d1;
        double d2;
    };
    std::vector<Jet> jets(std::span<const double> xs) const;
    std::vector<double> values(std::span<const double> xs) const;

private:
    Grid grid_;
    std::vector<Complex> half_;  // c_0 .. c_{n/2-1}
    double nyquist_coeff_;
};

} // namespace chsim
