#pragma once

#include "mise/classes.hpp"
#include "mise/heatmap.hpp"

#include <array>
#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mise {

/// Identifies one title-year.
struct TitleYear {
    std::string lccn;
    int year = 0;

    auto operator<=>(const TitleYear&) const = default;
    std::string str() const;  // "lccn:year"
};

TitleYear parse_title_year(std::string_view text);

using ClassWeights = std::array<double, kClassCount>;

inline constexpr ClassWeights kUnitWeights = {1, 1, 1, 1, 1, 1, 1};

struct LayoutVector {
    TitleYear id;
    std::vector<double> values;
    ClassWeights class_weights = kUnitWeights;
};

/// Concatenates the seven channels in class order, scaling channel k by weights[k].
LayoutVector vectorize(const CompositeHeatmap& composite, const ClassWeights& weights);

enum class Metric { l2, l1 };

Metric parse_metric(std::string_view name);
std::string_view metric_name(Metric m);

/// Norm of the residual a - b. Throws InputError on length or weight mismatch.
double distance(const LayoutVector& a, const LayoutVector& b, Metric metric = Metric::l2);

struct DistanceMatrix {
    std::vector<TitleYear> ids;
    std::vector<double> d;  // row-major n x n

    std::size_t size() const { return ids.size(); }
    double at(std::size_t i, std::size_t j) const { return d[i * ids.size() + j]; }
};

/// Full symmetric matrix with ids in (lccn, year) order. Rows are computed in
/// parallel (up to `threads` workers); every entry is produced by the same
/// kernel call regardless of the thread count.
DistanceMatrix distance_matrix(std::vector<LayoutVector> vectors, Metric metric = Metric::l2,
                               unsigned threads = 1);

/// Header row of `lccn:year` ids followed by the square matrix.
std::string distance_matrix_to_csv(const DistanceMatrix& m);
DistanceMatrix distance_matrix_from_csv(std::string_view text);

} // namespace mise
