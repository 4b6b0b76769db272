#pragma once

#include "mise/catalog.hpp"
#include "mise/similarity.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mise::cluster {

enum class Method { kmeans, dbscan };

Method parse_method(std::string_view name);
std::string_view method_name(Method m);

struct ClusterAssignment {
    std::vector<TitleYear> ids;
    std::vector<int> labels;  // -1 = noise (dbscan only)
    Method method = Method::kmeans;
    std::string params_used;
    /// Within-cluster sum of squares after each Lloyd iteration (kmeans only).
    std::vector<double> objective_trace;
};

inline constexpr int kMaxLloydIterations = 300;

/// Lloyd iteration from a seeded k-means++ start. `points` is n x 2 row-major.
/// Throws ConfigError unless 1 <= k <= n.
ClusterAssignment kmeans(std::span<const double> points, std::size_t k, std::uint64_t seed);

ClusterAssignment dbscan(std::span<const double> points, double eps, std::size_t min_pts);

double within_cluster_ss(std::span<const double> points, const std::vector<int>& labels);

/// Per-cluster members, distinct titles, community groups, and year span.
std::string cluster_report(const ClusterAssignment& assignment,
                           const catalog::CorpusManifest& manifest);

/// CSV `lccn,year,label`.
std::string assignment_to_csv(const ClusterAssignment& a);
ClusterAssignment assignment_from_csv(std::string_view text);

} // namespace mise::cluster
