#include "chsim/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace chsim {

Grid::Grid(double half_length, std::size_t n) : half_length_(half_length), n_(n) {
    if (!(half_length > 0.0) || !std::isfinite(half_length)) {
        throw ConfigError("grid half-length L must be positive and finite");
    }
    if (n < 16 || (n & (n - 1)) != 0) {
        std::ostringstream msg;
        msg << "grid size n=" << n << " must be a power of two and at least 16";
        throw ConfigError(msg.str());
    }
}

std::vector<double> Grid::points() const {
    std::vector<double> xs(n_);
    for (std::size_t j = 0; j < n_; ++j) {
        xs[j] = x(j);
    }
    return xs;
}

double Grid::wavenumber(std::size_t i) const {
    return std::numbers::pi * static_cast<double>(mode_index(i)) / half_length_;
}

double Grid::nyquist() const {
    return std::numbers::pi * static_cast<double>(n_ / 2) / half_length_;
}

void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) {
        throw ConfigError("fields live on different grids");
    }
}

RealField::RealField(const Grid& grid, std::vector<double> samples)
    : grid_(grid), samples_(std::move(samples)) {
    if (samples_.size() != grid_.size()) {
        std::ostringstream msg;
        msg << "sample count " << samples_.size() << " does not match grid size " << grid_.size();
        throw ConfigError(msg.str());
    }
}

double RealField::max_abs() const {
    double m = 0.0;
    for (double v : samples_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

bool RealField::all_finite() const {
    return std::all_of(samples_.begin(), samples_.end(), [](double v) { return std::isfinite(v); });
}

RealField& RealField::operator+=(const RealField& other) { return axpy(1.0, other); }

RealField& RealField::operator-=(const RealField& other) { return axpy(-1.0, other); }

RealField& RealField::operator*=(double s) {
    for (double& v : samples_) {
        v *= s;
    }
    return *this;
}

RealField& RealField::axpy(double s, const RealField& other) {
    require_same_grid(grid_, other.grid_);
    for (std::size_t j = 0; j < samples_.size(); ++j) {
        samples_[j] += s * other.samples_[j];
    }
    return *this;
}

RealField operator+(RealField a, const RealField& b) { return a += b; }
RealField operator-(RealField a, const RealField& b) { return a -= b; }
RealField operator*(double s, RealField a) { return a *= s; }

RealField pointwise(const RealField& a, const RealField& b) {
    require_same_grid(a.grid(), b.grid());
    RealField out(a.grid());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = a[j] * b[j];
    }
    return out;
}

SpectralField::SpectralField(const Grid& grid, std::vector<Complex> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.size()) {
        throw ConfigError("coefficient count does not match grid size");
    }
}

SpectralField& SpectralField::operator+=(const SpectralField& other) { return axpy(1.0, other); }

SpectralField& SpectralField::operator*=(double s) {
    for (auto& c : coeffs_) {
        c *= s;
    }
    return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& other) {
    require_same_grid(grid_, other.grid_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        coeffs_[i] += s * other.coeffs_[i];
    }
    return *this;
}

} // namespace chsim
