#include "mise/embed.hpp"

#include "mise/csv.hpp"
#include "mise/error.hpp"
#include "mise/random.hpp"
#include "mise/simd/kernels.hpp"
#include "mise/text.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace mise::tsne {
namespace {

// Internal stopping tolerance on the entropy in nats; much tighter than the
// perplexity contract so results are reproducible to many digits.
constexpr double kEntropyTolerance = 1e-12;

struct RowEval {
    double entropy;  // nats
};

// Unnormalised weights exp(-beta * (d2 - d2_min)) and the resulting entropy.
RowEval evaluate(const std::vector<double>& shifted, double beta, std::vector<double>& w) {
    double s = 0.0;
    double weighted = 0.0;
    for (std::size_t j = 0; j < shifted.size(); ++j) {
        w[j] = std::exp(-beta * shifted[j]);
        s += w[j];
        weighted += shifted[j] * w[j];
    }
    return {std::log(s) + beta * weighted / s};
}

double perplexity_error(double entropy_nats, double target) { return std::fabs(std::exp(entropy_nats) - target); }

} // namespace

RowCalibration calibrate_row(std::span<const double> distances, double perplexity) {
    const std::size_t n = distances.size();
    if (n == 0) throw InputError("cannot calibrate a row with no neighbours");
    if (!(perplexity >= 1.0) || perplexity > static_cast<double>(n))
        throw InputError("perplexity " + format_sig9(perplexity) + " must lie in [1, " + std::to_string(n) + "] for this row");

    std::vector<double> shifted(n);
    double d2_min = std::numeric_limits<double>::infinity();
    double d2_max = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(distances[j]) || distances[j] < 0.0) throw InputError("distances must be finite and non-negative");
        shifted[j] = distances[j] * distances[j];
        d2_min = std::min(d2_min, shifted[j]);
        d2_max = std::max(d2_max, shifted[j]);
    }
    for (double& s : shifted) s -= d2_min;

    RowCalibration out;
    out.conditional.assign(n, 1.0 / static_cast<double>(n));
    if (d2_max == 0.0) {
        out.degenerate = true;
        out.entropy_bits = std::log2(static_cast<double>(n));
        out.converged = perplexity_error(std::log(static_cast<double>(n)), perplexity) <= kPerplexityRelTolerance * perplexity;
        return out;
    }

    const double target = std::log(perplexity);
    std::vector<double> w(n);
    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double best_beta = beta;
    double best_err = std::numeric_limits<double>::infinity();
    for (int step = 0; step < kMaxBisectionSteps; ++step) {
        const RowEval e = evaluate(shifted, beta, w);
        const double err = perplexity_error(e.entropy, perplexity);
        if (err < best_err) {
            best_err = err;
            best_beta = beta;
        }
        const double diff = e.entropy - target;
        if (std::fabs(diff) < kEntropyTolerance) break;
        if (diff > 0) {  // too flat: sharpen
            lo = beta;
            beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
        } else {
            hi = beta;
            beta = 0.5 * (beta + lo);
        }
        if (!std::isinf(hi) && hi - lo <= 1e-15 * hi) break;
    }

    out.beta = best_beta;
    const RowEval e = evaluate(shifted, best_beta, w);
    double s = 0.0;
    for (double x : w) s += x;
    for (std::size_t j = 0; j < n; ++j) out.conditional[j] = w[j] / s;
    out.entropy_bits = e.entropy / std::numbers::ln2;
    out.converged = perplexity_error(e.entropy, perplexity) <= kPerplexityRelTolerance * perplexity;
    return out;
}

AffinityResult build_affinities(const DistanceMatrix& d, double perplexity) {
    const std::size_t n = d.size();
    if (n < 4) throw InputError("t-SNE needs at least 4 points, got fewer than 4 points (" + std::to_string(n) + ")");
    if (!(perplexity >= 2.0)) throw ConfigError("perplexity must be at least 2");

    AffinityResult result;
    const double cap = static_cast<double>(n - 1) / 3.0;
    result.effective_perplexity = perplexity;
    if (perplexity > cap) {
        result.effective_perplexity = cap;
        result.warnings.push_back("perplexity " + format_sig9(perplexity) + " clamped to " + format_sig9(cap) + " for " +
                                  std::to_string(n) + " points");
    }

    std::vector<double> cond(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row;
        row.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) row.push_back(d.at(i, j));
        }
        const RowCalibration c = calibrate_row(row, result.effective_perplexity);
        if (c.degenerate) result.warnings.push_back("row " + std::to_string(i) + " (" + d.ids[i].str() + "): all distances zero, uniform affinities used");
        else if (!c.converged) result.warnings.push_back("row " + std::to_string(i) + " (" + d.ids[i].str() + "): perplexity search did not converge");
        for (std::size_t j = 0, k = 0; j < n; ++j) {
            if (j != i) cond[i * n + j] = c.conditional[k++];
        }
    }

    AffinityMatrix& p = result.affinities;
    p.n = n;
    p.p.assign(n * n, 0.0);
    const double denom = 2.0 * static_cast<double>(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            p.p[i * n + j] = std::max((cond[i * n + j] + cond[j * n + i]) / denom, kAffinityFloor);
            total += p.p[i * n + j];
        }
    }
    for (double& v : p.p) v /= total;
    return result;
}

void TsneParams::validate() const {
    if (!(perplexity >= 2.0)) throw ConfigError("perplexity must be at least 2");
    if (iterations < 0) throw ConfigError("iterations must be non-negative");
    if (!(early_exaggeration >= 1.0)) throw ConfigError("early exaggeration must be at least 1");
    if (exaggeration_iterations < 0) throw ConfigError("exaggeration duration must be non-negative");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (!(momentum >= 0.0 && momentum < 1.0) || !(final_momentum >= 0.0 && final_momentum < 1.0))
        throw ConfigError("momentum must lie in [0, 1)");
    if (momentum_switch_iteration < 0) throw ConfigError("momentum switch iteration must be non-negative");
}

std::vector<double> initial_layout(std::size_t n, std::uint64_t seed) {
    Random rng(seed);
    std::vector<double> y(2 * n);
    for (double& v : y) v = kInitSigma * rng.normal();
    return y;
}

namespace {

struct Similarities {
    std::vector<double> num;  // n x n Student-t kernel, zero diagonal
    double z = 0.0;
};

Similarities student_t_similarities(std::size_t n, const std::vector<double>& xs, const std::vector<double>& ys,
                                    unsigned threads) {
    const simd::KernelTable& k = simd::active();
    Similarities s;
    s.num.resize(n * n);
    std::vector<double> row_sums(n);
    detail::parallel_for(n, threads, [&](std::size_t i) {
        double* row = s.num.data() + i * n;
        k.student_t(xs[i], ys[i], xs.data(), ys.data(), row, n);
        row[i] = 0.0;
        row_sums[i] = k.sum(row, n);
    });
    for (double r : row_sums) s.z += r;
    return s;
}

void split_coords(std::span<const double> y, std::vector<double>& xs, std::vector<double>& ys) {
    const std::size_t n = y.size() / 2;
    xs.resize(n);
    ys.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = y[2 * i];
        ys[i] = y[2 * i + 1];
    }
}

void check_shape(const AffinityMatrix& p, std::span<const double> y) {
    if (y.size() != 2 * p.n) throw InputError("coordinate count does not match the affinity matrix");
}

} // namespace

double kl_divergence(const AffinityMatrix& p, std::span<const double> y) {
    check_shape(p, y);
    const std::size_t n = p.n;
    std::vector<double> xs, ys;
    split_coords(y, xs, ys);
    const Similarities s = student_t_similarities(n, xs, ys, 1);
    double kl = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double pij = p.p[i * n + j];
            if (i == j || pij <= 0.0) continue;
            const double q = std::max(s.num[i * n + j] / s.z, kQFloor);
            kl += pij * std::log(pij / q);
        }
    }
    return std::max(0.0, kl);
}

namespace {

void gradient_into(const AffinityMatrix& p, const std::vector<double>& xs, const std::vector<double>& ys, double p_scale,
                   unsigned threads, std::vector<double>& grad) {
    const std::size_t n = p.n;
    const Similarities s = student_t_similarities(n, xs, ys, threads);
    const simd::KernelTable& k = simd::active();
    grad.resize(2 * n);
    detail::parallel_for(n, threads, [&](std::size_t i) {
        double gx = 0.0;
        double gy = 0.0;
        k.tsne_force(xs[i], ys[i], xs.data(), ys.data(), p.p.data() + i * n, s.num.data() + i * n, p_scale, s.z, n, &gx, &gy);
        grad[2 * i] = 4.0 * gx;
        grad[2 * i + 1] = 4.0 * gy;
    });
}

} // namespace

std::vector<double> kl_gradient(const AffinityMatrix& p, std::span<const double> y, double p_scale, unsigned threads) {
    check_shape(p, y);
    std::vector<double> xs, ys, grad;
    split_coords(y, xs, ys);
    gradient_into(p, xs, ys, p_scale, threads, grad);
    return grad;
}

Embedding optimize(const AffinityMatrix& p, const TsneParams& params) {
    params.validate();
    const std::size_t n = p.n;
    if (n < 4) throw InputError("t-SNE needs at least 4 points, got fewer than 4 points (" + std::to_string(n) + ")");

    Embedding e;
    e.y = initial_layout(n, params.seed);
    e.initial_kl = kl_divergence(p, e.y);

    std::vector<double> update(2 * n, 0.0);
    std::vector<double> gains(2 * n, 1.0);
    std::vector<double> xs, ys, grad;
    constexpr double kMinGain = 0.01;

    for (int it = 0; it < params.iterations; ++it) {
        const double p_scale = it < params.exaggeration_iterations ? params.early_exaggeration : 1.0;
        const double momentum = it < params.momentum_switch_iteration ? params.momentum : params.final_momentum;
        split_coords(e.y, xs, ys);
        gradient_into(p, xs, ys, p_scale, params.threads, grad);
        for (double g : grad) {
            if (!std::isfinite(g)) throw NumericError("non-finite gradient at iteration " + std::to_string(it));
        }
        for (std::size_t d = 0; d < 2 * n; ++d) {
            if (params.adaptive_gains) {
                gains[d] = (grad[d] > 0.0) != (update[d] > 0.0) ? gains[d] + 0.2 : gains[d] * 0.8;
                gains[d] = std::max(gains[d], kMinGain);
            }
            update[d] = momentum * update[d] - params.learning_rate * (gains[d] * grad[d]);
            e.y[d] += update[d];
        }
        // Re-centre; the objective is translation invariant.
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mx += e.y[2 * i];
            my += e.y[2 * i + 1];
        }
        mx /= static_cast<double>(n);
        my /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            e.y[2 * i] -= mx;
            e.y[2 * i + 1] -= my;
        }
        if (!std::isfinite(mx) || !std::isfinite(my)) throw NumericError("non-finite coordinates at iteration " + std::to_string(it));
        e.iterations_run = it + 1;
    }
    e.final_kl = kl_divergence(p, e.y);
    return e;
}

std::string embedding_to_csv(const Embedding& e) {
    std::string out = csv::format_row({"lccn", "year", "x", "y"});
    for (std::size_t i = 0; i < e.ids.size(); ++i) {
        out += csv::format_row({e.ids[i].lccn, std::to_string(e.ids[i].year), format_sig9(e.y[2 * i]), format_sig9(e.y[2 * i + 1])});
    }
    return out;
}

Embedding embedding_from_csv(std::string_view text) {
    const std::vector<csv::Row> rows = csv::parse(text);
    if (rows.empty() || rows[0] != csv::Row{"lccn", "year", "x", "y"}) throw InputError("embedding: expected header lccn,year,x,y");
    Embedding e;
    auto number = [](const std::string& s, auto& out) {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec != std::errc() || ptr != s.data() + s.size()) throw InputError("embedding: invalid number '" + s + "'");
    };
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 4) throw InputError("embedding row " + std::to_string(r + 1) + ": expected 4 columns");
        TitleYear id{rows[r][0], 0};
        number(rows[r][1], id.year);
        double x = 0, y = 0;
        number(rows[r][2], x);
        number(rows[r][3], y);
        e.ids.push_back(std::move(id));
        e.y.push_back(x);
        e.y.push_back(y);
    }
    return e;
}

} // namespace mise::tsne
