#pragma once

// Per-element terms shared by every kernel variant. The SIMD variants apply
// the same operations lane-wise and use these for their tails.

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace mise::simd::detail {

inline double squared_diff(double a, double b) {
    const double d = a - b;
    return d * d;
}

inline double abs_diff(double a, double b) { return std::fabs(a - b); }

inline double saturate(double dst, double x, double scale) { return std::min(1.0, dst + scale * x); }

inline double student_t(double xi, double yi, double xj, double yj) {
    const double dx = xi - xj;
    const double dy = yi - yj;
    return 1.0 / (1.0 + (dx * dx + dy * dy));
}

inline double force_weight(double p, double num, double p_scale, double z) {
    return (p_scale * p - num / z) * num;
}

inline double combine_lanes(const double lanes[4]) { return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]); }

inline constexpr std::size_t kLanes = 4;

} // namespace mise::simd::detail
