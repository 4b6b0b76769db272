#include "mise/simd/kernels.hpp"

#include "terms.hpp"

namespace mise::simd {
namespace {

using detail::kLanes;

// Reference reduction: four interleaved accumulators over full blocks, then
// the tail in order.
template <class Term>
double lane_sum(std::size_t n, Term term) {
    double lanes[kLanes] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        for (std::size_t l = 0; l < kLanes; ++l) lanes[l] += term(i + l);
    }
    double s = detail::combine_lanes(lanes);
    for (; i < n; ++i) s += term(i);
    return s;
}

double squared_l2(const double* a, const double* b, std::size_t n) {
    return lane_sum(n, [&](std::size_t i) { return detail::squared_diff(a[i], b[i]); });
}

double l1(const double* a, const double* b, std::size_t n) {
    return lane_sum(n, [&](std::size_t i) { return detail::abs_diff(a[i], b[i]); });
}

double sum(const double* a, std::size_t n) {
    return lane_sum(n, [&](std::size_t i) { return a[i]; });
}

void saturating_axpy(double* dst, const double* x, double scale, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = detail::saturate(dst[i], x[i], scale);
}

void student_t(double xi, double yi, const double* xs, const double* ys, double* out, std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) out[j] = detail::student_t(xi, yi, xs[j], ys[j]);
}

void tsne_force(double xi, double yi, const double* xs, const double* ys, const double* p,
                const double* num, double p_scale, double z, std::size_t n, double* gx, double* gy) {
    *gx = lane_sum(n, [&](std::size_t j) {
        return detail::force_weight(p[j], num[j], p_scale, z) * (xi - xs[j]);
    });
    *gy = lane_sum(n, [&](std::size_t j) {
        return detail::force_weight(p[j], num[j], p_scale, z) * (yi - ys[j]);
    });
}

} // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{Isa::scalar, squared_l2, l1, sum, saturating_axpy, student_t, tsne_force};
    return table;
}

} // namespace mise::simd
