#pragma once

// Finite-size scaling: least-squares power-law fits on log-log data.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "cw2/error.hpp"

namespace cw2 {

struct ScalingFit {
    double exponent = 0.0;  // slope of log(value) against log(N)
    double intercept = 0.0; // log-space intercept
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points; // (N, value)
};

inline ScalingFit fit_power_law(std::vector<std::pair<double, double>> points)
{
    require(points.size() >= 3, "a scaling fit needs at least 3 points");
    const auto n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [N, v] : points) {
        require(N > 0.0 && v > 0.0, "scaling fit requires positive N and values");
        mx += std::log(N);
        my += std::log(v);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [N, v] : points) {
        const double dx = std::log(N) - mx, dy = std::log(v) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    require(sxx > 0.0, "scaling fit needs at least two distinct N");
    ScalingFit f;
    f.exponent = sxy / sxx;
    f.intercept = my - f.exponent * mx;
    double ss_res = 0.0;
    for (const auto& [N, v] : points) {
        const double r = std::log(v) - (f.intercept + f.exponent * std::log(N));
        ss_res += r * r;
    }
    f.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    f.points = std::move(points);
    return f;
}

} // namespace cw2
