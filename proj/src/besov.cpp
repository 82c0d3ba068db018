#include "chsim/besov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "chsim/spectral.hpp"

namespace chsim {

BesovIndex::BesovIndex(double s_, double p_, double q_) : s(s_), p(p_), q(q_) {
    std::ostringstream msg;
    if (!std::isfinite(s)) {
        msg << "Besov regularity s must be finite; ";
    }
    if (!(p >= 1.0)) {
        msg << "Besov integrability p=" << p << " must lie in [1, inf]; ";
    }
    if (!(q >= 1.0)) {
        msg << "Besov summability q=" << q << " must lie in [1, inf]; ";
    }
    if (!msg.str().empty()) {
        throw ConfigError(msg.str());
    }
}

namespace {

double smooth_chi(double xi) {
    const double a = std::abs(xi);
    if (a <= 1.0) {
        return 1.0;
    }
    if (a >= 2.0) {
        return 0.0;
    }
    return 0.5 * (1.0 + std::cos(std::numbers::pi * std::log2(a)));
}

} // namespace

std::pair<double, double> annulus_constants(CutoffStyle style) {
    return style == CutoffStyle::sharp ? std::pair{1.0, 2.0} : std::pair{1.0, 4.0};
}

double block_multiplier(CutoffStyle style, int k, double xi) {
    const double a = std::abs(xi);
    if (style == CutoffStyle::sharp) {
        if (k < 0) {
            return a < 1.0 ? 1.0 : 0.0;
        }
        const double lo = std::ldexp(1.0, k);
        return (a >= lo && a < 2.0 * lo) ? 1.0 : 0.0;
    }
    if (k < 0) {
        return smooth_chi(a);
    }
    return smooth_chi(a / std::ldexp(1.0, k + 1)) - smooth_chi(a / std::ldexp(1.0, k));
}

int dyadic_k_max(const Grid& grid) {
    return std::max(-1, static_cast<int>(std::ceil(std::log2(grid.nyquist()))));
}

DyadicDecomposition lp_decompose(const RealField& f, CutoffStyle style) {
    const Grid& g = f.grid();
    const SpectralField F = transform(f);
    const int k_max = dyadic_k_max(g);
    DyadicDecomposition out{style, {}};
    out.blocks.reserve(static_cast<std::size_t>(k_max + 2));
    for (int k = -1; k <= k_max; ++k) {
        SpectralField B = F;
        for (std::size_t i = 0; i < B.size(); ++i) {
            B[i] *= block_multiplier(style, k, g.wavenumber(i));
        }
        out.blocks.push_back(inverse_transform(B));
    }
    return out;
}

RealField low_pass(const RealField& f, int k, CutoffStyle style) {
    const Grid& g = f.grid();
    SpectralField F = transform(f);
    for (std::size_t i = 0; i < F.size(); ++i) {
        double w = 0.0;
        for (int j = -1; j <= k - 1; ++j) {
            w += block_multiplier(style, j, g.wavenumber(i));
        }
        F[i] *= w;
    }
    return inverse_transform(F);
}

double lp_norm(const RealField& f, double p) {
    if (std::isinf(p)) {
        return f.max_abs();
    }
    double s = 0.0;
    if (p == 2.0) {
        for (double v : f.samples()) {
            s += v * v;
        }
        return std::sqrt(s * f.grid().dx());
    }
    for (double v : f.samples()) {
        s += std::pow(std::abs(v), p);
    }
    return std::pow(s * f.grid().dx(), 1.0 / p);
}

std::vector<BesovTerm> besov_terms(const RealField& f, const BesovIndex& idx, CutoffStyle style) {
    const DyadicDecomposition dec = lp_decompose(f, style);
    std::vector<BesovTerm> terms;
    terms.reserve(dec.blocks.size());
    for (int k = -1; k <= dec.k_max(); ++k) {
        const double bn = lp_norm(dec.block(k), idx.p);
        terms.push_back({k, bn, std::exp2(k * idx.s) * bn});
    }
    return terms;
}

double besov_norm(const RealField& f, const BesovIndex& idx, CutoffStyle style) {
    const auto terms = besov_terms(f, idx, style);
    if (std::isinf(idx.q)) {
        double m = 0.0;
        for (const auto& t : terms) {
            m = std::max(m, t.weighted);
        }
        return m;
    }
    double s = 0.0;
    for (const auto& t : terms) {
        s += std::pow(t.weighted, idx.q);
    }
    return std::pow(s, 1.0 / idx.q);
}

double sobolev_norm(const RealField& f, double s) {
    const SpectralField F = transform(f);
    const Grid& g = f.grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < F.size(); ++i) {
        const double xi = g.wavenumber(i);
        acc += std::exp(s * std::log1p(xi * xi)) * std::norm(F[i]);
    }
    return std::sqrt(2.0 * g.half_length() * acc);
}

} // namespace chsim
