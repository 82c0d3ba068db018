#pragma once

#include <string>

#include "chsim/field.hpp"

namespace chsim {

/// Named initial-data profiles.
struct Profile {
    enum class Kind { zero, gaussian, bump, mode };

    Kind kind = Kind::zero;
    double amp = 0.0;
    double width = 1.0;
    double center = 0.0;
    /// Integer mode index for Kind::mode: amp * sin(pi k x / L).
    long k = 1;
    /// Constant background added to every sample.
    double offset = 0.0;

    static Profile zero() { return {}; }
    static Profile gaussian(double amp, double width, double center = 0.0) {
        return {Kind::gaussian, amp, width, center, 1};
    }
    static Profile bump(double amp, double width, double center = 0.0) { return {Kind::bump, amp, width, center, 1}; }
    static Profile mode(long k, double amp) { return {Kind::mode, amp, 1.0, 0.0, k}; }

    RealField sample(const Grid& grid) const;
};

std::string to_string(Profile::Kind kind);
Profile::Kind profile_kind_from_string(const std::string& s);

/// C-infinity bump exp(-1/(1 - (x/w)^2)) on |x| < w, zero outside.
double smooth_bump(double x, double width);

} // namespace chsim
