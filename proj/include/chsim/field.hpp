#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "chsim/errors.hpp"

namespace chsim {

using Complex = std::complex<double>;

/// Uniform periodic sampling of [-L, L) with n points.
class Grid {
public:
    Grid(double half_length, std::size_t n);

    double half_length() const { return half_length_; }
    std::size_t size() const { return n_; }
    double dx() const { return 2.0 * half_length_ / static_cast<double>(n_); }
    double x(std::size_t j) const { return -half_length_ + static_cast<double>(j) * dx(); }
    std::vector<double> points() const;

    /// Signed wavenumber index for storage slot i (FFT order): 0..n/2-1, then -n/2..-1.
    long mode_index(std::size_t i) const {
        const auto k = static_cast<long>(i);
        return k < static_cast<long>(n_ / 2) ? k : k - static_cast<long>(n_);
    }
    double wavenumber(std::size_t i) const;
    double nyquist() const;
    bool is_nyquist(std::size_t i) const { return i == n_ / 2; }

    bool operator==(const Grid& other) const = default;

private:
    double half_length_;
    std::size_t n_;
};

class RealField {
public:
    explicit RealField(const Grid& grid) : grid_(grid), samples_(grid.size(), 0.0) {}
    RealField(const Grid& grid, std::vector<double> samples);

    template <class F>
    static RealField from_function(const Grid& grid, F&& f) {
        std::vector<double> v(grid.size());
        for (std::size_t j = 0; j < v.size(); ++j) {
            v[j] = f(grid.x(j));
        }
        return RealField(grid, std::move(v));
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return samples_.size(); }
    std::span<const double> samples() const { return samples_; }
    std::span<double> samples() { return samples_; }
    double operator[](std::size_t j) const { return samples_[j]; }
    double& operator[](std::size_t j) { return samples_[j]; }

    double max_abs() const;
    bool all_finite() const;

    RealField& operator+=(const RealField& other);
    RealField& operator-=(const RealField& other);
    RealField& operator*=(double s);
    /// this += s * other
    RealField& axpy(double s, const RealField& other);

private:
    Grid grid_;
    std::vector<double> samples_;
};

RealField operator+(RealField a, const RealField& b);
RealField operator-(RealField a, const RealField& b);
RealField operator*(double s, RealField a);
/// Pointwise product without any dealiasing.
RealField pointwise(const RealField& a, const RealField& b);

/// Fourier coefficients c_k with f(x) = sum_k c_k exp(i xi_k x), stored in FFT order.
class SpectralField {
public:
    explicit SpectralField(const Grid& grid) : grid_(grid), coeffs_(grid.size(), Complex{}) {}
    SpectralField(const Grid& grid, std::vector<Complex> coeffs);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return coeffs_.size(); }
    std::span<const Complex> coeffs() const { return coeffs_; }
    std::span<Complex> coeffs() { return coeffs_; }
    Complex operator[](std::size_t i) const { return coeffs_[i]; }
    Complex& operator[](std::size_t i) { return coeffs_[i]; }

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator*=(double s);
    SpectralField& axpy(double s, const SpectralField& other);

private:
    Grid grid_;
    std::vector<Complex> coeffs_;
};

void require_same_grid(const Grid& a, const Grid& b);

} // namespace chsim
