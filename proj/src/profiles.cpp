#include "chsim/profiles.hpp"

#include <cmath>
#include <numbers>

namespace chsim {

double smooth_bump(double x, double width) {
    const double y = x / width;
    if (std::abs(y) >= 1.0) {
        return 0.0;
    }
    return std::exp(-1.0 / (1.0 - y * y));
}

namespace {

RealField shape(const Profile& p, const Grid& grid) {
    switch (p.kind) {
    case Profile::Kind::zero:
        return RealField(grid);
    case Profile::Kind::gaussian:
        return RealField::from_function(grid, [&](double x) {
            const double y = (x - p.center) / p.width;
            return p.amp * std::exp(-y * y);
        });
    case Profile::Kind::bump:
        return RealField::from_function(grid, [&](double x) { return p.amp * smooth_bump(x - p.center, p.width); });
    case Profile::Kind::mode:
        return RealField::from_function(grid, [&](double x) {
            return p.amp * std::sin(std::numbers::pi * static_cast<double>(p.k) * x / grid.half_length());
        });
    }
    return RealField(grid);
}

} // namespace

RealField Profile::sample(const Grid& grid) const {
    RealField f = shape(*this, grid);
    if (offset != 0.0) {
        for (double& v : f.samples()) {
            v += offset;
        }
    }
    return f;
}

std::string to_string(Profile::Kind kind) {
    switch (kind) {
    case Profile::Kind::zero:
        return "zero";
    case Profile::Kind::gaussian:
        return "gaussian";
    case Profile::Kind::bump:
        return "bump";
    case Profile::Kind::mode:
        return "mode";
    }
    return "zero";
}

Profile::Kind profile_kind_from_string(const std::string& s) {
    if (s == "zero") {
        return Profile::Kind::zero;
    }
    if (s == "gaussian") {
        return Profile::Kind::gaussian;
    }
    if (s == "bump") {
        return Profile::Kind::bump;
    }
    if (s == "mode") {
        return Profile::Kind::mode;
    }
    throw ConfigError("unknown profile '" + s + "' (expected zero, gaussian, bump or mode)");
}

} // namespace chsim
