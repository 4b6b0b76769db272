#pragma once

#include "mise/similarity.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mise::tsne {

inline constexpr double kAffinityFloor = 1e-12;
inline constexpr double kQFloor = 1e-12;
inline constexpr double kPerplexityRelTolerance = 1e-5;
inline constexpr int kMaxBisectionSteps = 200;
inline constexpr double kInitSigma = 1e-4;

struct RowCalibration {
    double beta = 1.0;                // precision applied to squared distances
    std::vector<double> conditional;  // p_{j|i}, sums to 1
    double entropy_bits = 0.0;
    bool converged = true;
    bool degenerate = false;          // all distances zero, uniform returned
};

/// Binary search on the Gaussian precision so that 2^H matches `perplexity`.
/// `distances` excludes the point itself.
RowCalibration calibrate_row(std::span<const double> distances, double perplexity);

struct AffinityMatrix {
    std::size_t n = 0;
    std::vector<double> p;  // row-major n x n, symmetric, zero diagonal, sums to 1

    double at(std::size_t i, std::size_t j) const { return p[i * n + j]; }
};

struct AffinityResult {
    AffinityMatrix affinities;
    double effective_perplexity = 0;
    std::vector<std::string> warnings;
};

/// Calibrated, symmetrised, floored, and normalised joint affinities.
/// Throws InputError for fewer than 4 points.
AffinityResult build_affinities(const DistanceMatrix& d, double perplexity);

struct TsneParams {
    double perplexity = 30.0;
    int iterations = 1000;
    double early_exaggeration = 12.0;
    int exaggeration_iterations = 250;
    double learning_rate = 200.0;
    double momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch_iteration = 250;
    bool adaptive_gains = true;
    std::uint64_t seed = 42;
    unsigned threads = 1;

    void validate() const;  // throws ConfigError
};

struct Embedding {
    std::vector<TitleYear> ids;
    std::vector<double> y;  // n x 2, row-major
    double initial_kl = 0;
    double final_kl = 0;
    int iterations_run = 0;

    std::size_t size() const { return y.size() / 2; }
};

/// Seeded N(0, sigma^2) initial layout.
std::vector<double> initial_layout(std::size_t n, std::uint64_t seed);

/// KL(P || Q) with Q the Student-t similarities of `y`, q floored at kQFloor.
double kl_divergence(const AffinityMatrix& p, std::span<const double> y);

/// Analytic gradient of KL(p_scale * P || Q) with respect to y.
std::vector<double> kl_gradient(const AffinityMatrix& p, std::span<const double> y,
                                double p_scale = 1.0, unsigned threads = 1);

/// Momentum gradient descent from the seeded initial layout. Identical inputs
/// and seed produce bit-identical output. Throws NumericError on a non-finite
/// gradient.
Embedding optimize(const AffinityMatrix& p, const TsneParams& params);

/// CSV `lccn,year,x,y`.
std::string embedding_to_csv(const Embedding& e);
Embedding embedding_from_csv(std::string_view text);

} // namespace mise::tsne
