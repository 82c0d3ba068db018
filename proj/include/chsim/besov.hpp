#pragma once

#include <limits>
#include <vector>

#include "chsim/field.hpp"

namespace chsim {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Regularity s, integrability p and summability q of B^s_{p,q}.
struct BesovIndex {
    BesovIndex(double s, double p, double q);

    double s;
    double p;
    double q;
};

/// Sharp: indicator annuli 2^k <= |xi| < 2^{k+1}, low-pass |xi| < 1.
/// Smooth: raised-cosine partition with the transition spread over one octave,
/// so block k lives in 2^k <= |xi| <= 2^{k+2}.
enum class CutoffStyle { sharp, smooth };

struct DyadicDecomposition {
    CutoffStyle style;
    /// blocks[0] is the low-pass block k = -1; blocks[j] is block k = j - 1.
    std::vector<RealField> blocks;

    int k_max() const { return static_cast<int>(blocks.size()) - 2; }
    const RealField& block(int k) const { return blocks.at(static_cast<std::size_t>(k + 1)); }
};

/// Annulus constants (c1, c2) of block k >= 0: support in [2^k c1, 2^k c2].
std::pair<double, double> annulus_constants(CutoffStyle style);

/// Fourier-side weight of block k at wavenumber xi; sums to 1 over k = -1..k_max.
double block_multiplier(CutoffStyle style, int k, double xi);

/// Largest block index that can be nonzero on the grid: ceil(log2 xi_nyquist), at least -1.
int dyadic_k_max(const Grid& grid);

DyadicDecomposition lp_decompose(const RealField& f, CutoffStyle style = CutoffStyle::sharp);

/// Low-pass S_k f = sum_{j <= k-1} Delta_j f.
RealField low_pass(const RealField& f, int k, CutoffStyle style = CutoffStyle::sharp);

/// Grid-quadrature L^p norm; p = infinity takes the sample maximum.
double lp_norm(const RealField& f, double p);

struct BesovTerm {
    int k;
    double block_norm;
    double weighted;
};

std::vector<BesovTerm> besov_terms(const RealField& f, const BesovIndex& idx, CutoffStyle style = CutoffStyle::sharp);
double besov_norm(const RealField& f, const BesovIndex& idx, CutoffStyle style = CutoffStyle::sharp);

/// (2L sum_xi (1 + xi^2)^s |c_xi|^2)^{1/2}; equals the grid L^2 norm at s = 0.
double sobolev_norm(const RealField& f, double s);

} // namespace chsim
