#include "chsim/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

namespace chsim {

namespace {

// FFTW planning is not thread-safe; execution on fresh arrays is.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(std::size_t n, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_pair(n, sign);
        if (auto it = plans_.find(key); it != plans_.end()) {
            return it->second;
        }
        std::vector<Complex> a(n), b(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(a.data()),
                                          reinterpret_cast<fftw_complex*>(b.data()), sign,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) {
            fftw_destroy_plan(plan);
        }
    }

private:
    std::mutex mutex_;
    std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

void execute(std::size_t n, int sign, std::vector<Complex>& in, std::vector<Complex>& out) {
    fftw_plan plan = PlanCache::instance().get(n, sign);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()), reinterpret_cast<fftw_complex*>(out.data()));
}

void check_inertia_exponent(double r, InertiaRange range) {
    if (!std::isfinite(r)) {
        throw DomainError("inertia exponent must be finite");
    }
    if (range == InertiaRange::standard && r < 1.0) {
        std::ostringstream msg;
        msg << "inertia exponent r=" << r << " is below 1; pass InertiaRange::exploratory to override";
        throw DomainError(msg.str());
    }
}

template <class Multiplier>
SpectralField apply_multiplier(SpectralField F, Multiplier&& mult) {
    const Grid& g = F.grid();
    for (std::size_t i = 0; i < F.size(); ++i) {
        F[i] *= mult(g.wavenumber(i), i);
    }
    return F;
}

} // namespace

SpectralField transform(const RealField& f) {
    const Grid& g = f.grid();
    const std::size_t n = g.size();
    std::vector<Complex> in(n), out(n);
    for (std::size_t j = 0; j < n; ++j) {
        in[j] = f[j];
    }
    execute(n, FFTW_FORWARD, in, out);
    // x_j = -L + j dx shifts every mode by exp(i pi k) = (-1)^k.
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] *= (i % 2 == 0 ? scale : -scale);
    }
    return SpectralField(g, std::move(out));
}

RealField inverse_transform(const SpectralField& F) {
    const Grid& g = F.grid();
    const std::size_t n = g.size();
    std::vector<Complex> in(F.coeffs().begin(), F.coeffs().end()), out(n);
    for (std::size_t i = 1; i < n; i += 2) {
        in[i] = -in[i];
    }
    execute(n, FFTW_BACKWARD, in, out);
    std::vector<double> samples(n);
    for (std::size_t j = 0; j < n; ++j) {
        samples[j] = out[j].real();
    }
    return RealField(g, std::move(samples));
}

SpectralField derivative(const SpectralField& F, int order) {
    if (order < 0) {
        throw ConfigError("derivative order must be non-negative");
    }
    if (order == 0) {
        return F;
    }
    const Grid& g = F.grid();
    return apply_multiplier(F, [&](double xi, std::size_t i) -> Complex {
        if (order % 2 == 1 && g.is_nyquist(i)) {
            return 0.0;
        }
        Complex m = 1.0;
        for (int p = 0; p < order; ++p) {
            m *= Complex(0.0, xi);
        }
        return m;
    });
}

RealField derivative(const RealField& f, int order) {
    return inverse_transform(derivative(transform(f), order));
}

SpectralField apply_inertia(const SpectralField& F, double r, InertiaRange range) {
    check_inertia_exponent(r, range);
    return apply_multiplier(F, [r](double xi, std::size_t) -> Complex { return std::exp(r * std::log1p(xi * xi)); });
}

RealField apply_inertia(const RealField& f, double r, InertiaRange range) {
    return inverse_transform(apply_inertia(transform(f), r, range));
}

SpectralField invert_inertia(const SpectralField& F, double r, InertiaRange range) {
    check_inertia_exponent(r, range);
    return apply_multiplier(F, [r](double xi, std::size_t) -> Complex { return std::exp(-r * std::log1p(xi * xi)); });
}

RealField invert_inertia(const RealField& f, double r, InertiaRange range) {
    return inverse_transform(invert_inertia(transform(f), r, range));
}

RealField helmholtz_convolve(const RealField& f) { return invert_inertia(f, 1.0); }

bool dealias_keeps(const Grid& grid, std::size_t i) {
    // |k| <= n/3 in integer arithmetic, the same as |xi| <= (2/3) xi_nyquist.
    const long k = grid.mode_index(i);
    return 3 * std::labs(k) <= static_cast<long>(grid.size());
}

SpectralField dealias(SpectralField F) {
    const Grid g = F.grid();
    for (std::size_t i = 0; i < F.size(); ++i) {
        if (!dealias_keeps(g, i)) {
            F[i] = 0.0;
        }
    }
    return F;
}

SpectralField dealiased_product(const RealField& a, const RealField& b) {
    return dealias(transform(pointwise(a, b)));
}

double l2_norm(const RealField& f) {
    double s = 0.0;
    for (double v : f.samples()) {
        s += v * v;
    }
    return std::sqrt(s * f.grid().dx());
}

TrigInterpolant::TrigInterpolant(const SpectralField& F) : grid_(F.grid()) {
    const std::size_t half = grid_.size() / 2;
    half_.assign(F.coeffs().begin(), F.coeffs().begin() + static_cast<long>(half));
    nyquist_coeff_ = F[half].real();
}

double TrigInterpolant::operator()(double x) const {
    const double pts[1] = {x};
    return values(pts)[0];
}

std::vector<TrigInterpolant::Jet> TrigInterpolant::jets(std::span<const double> xs) const {
    const double base = std::numbers::pi / grid_.half_length();
    const double xi_nyq = -grid_.nyquist();
    std::vector<Jet> out(xs.size());
    for (std::size_t p = 0; p < xs.size(); ++p) {
        const double x = xs[p];
        const double theta = base * x;
        const Complex w = std::polar(1.0, theta);
        Complex z = 1.0;
        double v = half_[0].real();
        double d1 = 0.0;
        double d2 = 0.0;
        for (std::size_t k = 1; k < half_.size(); ++k) {
            // Re-anchor the running power so the recurrence error stays at O(64 eps).
            z = (k % 64 == 0) ? std::polar(1.0, theta * static_cast<double>(k)) : z * w;
            const Complex t = half_[k] * z;
            const double xi = base * static_cast<double>(k);
            v += 2.0 * t.real();
            d1 -= 2.0 * xi * t.imag();
            d2 -= 2.0 * xi * xi * t.real();
        }
        const double cn = nyquist_coeff_ * std::cos(xi_nyq * x);
        v += cn;
        d2 -= xi_nyq * xi_nyq * cn;
        out[p] = {v, d1, d2};
    }
    return out;
}

std::vector<double> TrigInterpolant::values(std::span<const double> xs) const {
    const double base = std::numbers::pi / grid_.half_length();
    const double xi_nyq = -grid_.nyquist();
    std::vector<double> out(xs.size());
    for (std::size_t p = 0; p < xs.size(); ++p) {
        const double theta = base * xs[p];
        const Complex w = std::polar(1.0, theta);
        Complex z = 1.0;
        double v = half_[0].real();
        for (std::size_t k = 1; k < half_.size(); ++k) {
            z = (k % 64 == 0) ? std::polar(1.0, theta * static_cast<double>(k)) : z * w;
            v += 2.0 * (half_[k].real() * z.real() - half_[k].imag() * z.imag());
        }
        out[p] = v + nyquist_coeff_ * std::cos(xi_nyq * xs[p]);
    }
    return out;
}

} // namespace chsim
