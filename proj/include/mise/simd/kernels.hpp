#pragma once

#include <cstddef>
#include <string_view>

namespace mise::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Inner-loop kernels. Every implementation uses the same reduction order
/// (four interleaved lanes over blocks of four, combined as
/// (l0 + l1) + (l2 + l3), then the tail in sequence) and no fused
/// multiply-add, so all variants return bit-identical results.
struct KernelTable {
    Isa isa;

    /// sum (a[i] - b[i])^2
    double (*squared_l2)(const double* a, const double* b, std::size_t n);
    /// sum |a[i] - b[i]|
    double (*l1)(const double* a, const double* b, std::size_t n);
    /// sum a[i]
    double (*sum)(const double* a, std::size_t n);
    /// dst[i] = min(1, dst[i] + scale * x[i])
    void (*saturating_axpy)(double* dst, const double* x, double scale, std::size_t n);
    /// out[j] = 1 / (1 + (xi - xs[j])^2 + (yi - ys[j])^2)
    void (*student_t)(double xi, double yi, const double* xs, const double* ys, double* out,
                      std::size_t n);
    /// w[j] = (p_scale * p[j] - num[j] / z) * num[j];
    /// gx = sum w[j] * (xi - xs[j]), gy = sum w[j] * (yi - ys[j])
    void (*tsne_force)(double xi, double yi, const double* xs, const double* ys, const double* p,
                       const double* num, double p_scale, double z, std::size_t n, double* gx,
                       double* gy);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Kernels selected at first use: AVX2 when available, unless the
/// MISE_SIMD environment variable is set to "scalar".
const KernelTable& active();

/// Overrides the runtime selection. Throws ConfigError if `isa` is unavailable.
void select(Isa isa);

} // namespace mise::simd
