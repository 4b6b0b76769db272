#include "mise/simd/kernels.hpp"

#include "terms.hpp"

#include <immintrin.h>

namespace mise::simd {
namespace {

using detail::kLanes;

inline double finish(__m256d acc) {
    alignas(32) double lanes[kLanes];
    _mm256_store_pd(lanes, acc);
    return detail::combine_lanes(lanes);
}

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

double squared_l2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double s = finish(acc);
    for (; i < n; ++i) s += detail::squared_diff(a[i], b[i]);
    return s;
}

double l1(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, abs_pd(d));
    }
    double s = finish(acc);
    for (; i < n; ++i) s += detail::abs_diff(a[i], b[i]);
    return s;
}

double sum(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = finish(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

void saturating_axpy(double* dst, const double* x, double scale, std::size_t n) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d vs = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d v = _mm256_add_pd(_mm256_loadu_pd(dst + i), _mm256_mul_pd(vs, _mm256_loadu_pd(x + i)));
        // min(v, 1) picks 1 unless v < 1, matching std::min(1.0, v).
        _mm256_storeu_pd(dst + i, _mm256_blendv_pd(one, v, _mm256_cmp_pd(v, one, _CMP_LT_OQ)));
    }
    for (; i < n; ++i) dst[i] = detail::saturate(dst[i], x[i], scale);
}

void student_t(double xi, double yi, const double* xs, const double* ys, double* out, std::size_t n) {
    const __m256d vxi = _mm256_set1_pd(xi);
    const __m256d vyi = _mm256_set1_pd(yi);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t j = 0;
    for (; j + kLanes <= n; j += kLanes) {
        const __m256d dx = _mm256_sub_pd(vxi, _mm256_loadu_pd(xs + j));
        const __m256d dy = _mm256_sub_pd(vyi, _mm256_loadu_pd(ys + j));
        const __m256d t = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        _mm256_storeu_pd(out + j, _mm256_div_pd(one, _mm256_add_pd(one, t)));
    }
    for (; j < n; ++j) out[j] = detail::student_t(xi, yi, xs[j], ys[j]);
}

void tsne_force(double xi, double yi, const double* xs, const double* ys, const double* p,
                const double* num, double p_scale, double z, std::size_t n, double* gx, double* gy) {
    const __m256d vxi = _mm256_set1_pd(xi);
    const __m256d vyi = _mm256_set1_pd(yi);
    const __m256d vps = _mm256_set1_pd(p_scale);
    const __m256d vz = _mm256_set1_pd(z);
    __m256d ax = _mm256_setzero_pd();
    __m256d ay = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + kLanes <= n; j += kLanes) {
        const __m256d vnum = _mm256_loadu_pd(num + j);
        const __m256d w = _mm256_mul_pd(
            _mm256_sub_pd(_mm256_mul_pd(vps, _mm256_loadu_pd(p + j)), _mm256_div_pd(vnum, vz)), vnum);
        ax = _mm256_add_pd(ax, _mm256_mul_pd(w, _mm256_sub_pd(vxi, _mm256_loadu_pd(xs + j))));
        ay = _mm256_add_pd(ay, _mm256_mul_pd(w, _mm256_sub_pd(vyi, _mm256_loadu_pd(ys + j))));
    }
    double sx = finish(ax);
    double sy = finish(ay);
    for (; j < n; ++j) {
        const double w = detail::force_weight(p[j], num[j], p_scale, z);
        sx += w * (xi - xs[j]);
        sy += w * (yi - ys[j]);
    }
    *gx = sx;
    *gy = sy;
}

} // namespace

const KernelTable& avx2_kernel_table() {
    static const KernelTable table{Isa::avx2, squared_l2, l1, sum, saturating_axpy, student_t, tsne_force};
    return table;
}

} // namespace mise::simd
