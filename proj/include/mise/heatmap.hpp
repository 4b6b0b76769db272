#pragma once

#include "mise/classes.hpp"
#include "mise/ingest.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mise {

/// Row-major grid of non-negative coverage values.
struct Grid {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    Grid() = default;
    Grid(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    double max() const;
    double sum() const;

    bool operator==(const Grid&) const = default;
};

struct CompositeHeatmap {
    std::string lccn;
    int year = 0;
    std::size_t page_count = 0;
    std::array<Grid, kClassCount> channels;

    const Grid& channel(ContentClass c) const { return channels[class_index(c)]; }
    std::size_t rows() const { return channels[0].rows; }
    std::size_t cols() const { return channels[0].cols; }

    bool operator==(const CompositeHeatmap&) const = default;
};

inline constexpr std::size_t kDefaultRows = 64;
inline constexpr std::size_t kDefaultCols = 48;
inline constexpr std::size_t kDefaultMinPages = 5;

/// Fraction of each cell covered by the box (intersection area / cell area).
Grid rasterize_box(const BoundingBox& box, std::size_t rows, std::size_t cols);

/// Per-page layer for one class: sum of rasterised boxes, saturated at 1.
Grid page_channel_grid(const PageRecord& page, ContentClass cls, std::size_t rows,
                       std::size_t cols);

/// Streaming (lccn, year) accumulator. Per-page cell values are summed in
/// 2^-40 fixed point so merges are exact, associative, and commutative; the
/// result does not depend on page order or on how pages were partitioned
/// across workers.
class CompositeAccumulator {
public:
    CompositeAccumulator(std::size_t rows, std::size_t cols);

    void add_page(const PageRecord& page);
    void merge(const CompositeAccumulator& other);

    struct Result {
        std::vector<CompositeHeatmap> composites;  // sorted by (lccn, year)
        std::vector<std::pair<std::pair<std::string, int>, std::size_t>> dropped;
    };
    Result finish(std::size_t min_pages) const;

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

private:
    struct Sums {
        std::size_t pages = 0;
        std::vector<std::int64_t> cells;  // kClassCount * rows * cols
    };
    std::size_t rows_;
    std::size_t cols_;
    std::map<std::pair<std::string, int>, Sums> sums_;
};

struct AggregateResult {
    std::vector<CompositeHeatmap> composites;
    /// (lccn, year) keys below min_pages, with their page counts.
    std::vector<std::pair<std::pair<std::string, int>, std::size_t>> dropped;
};

/// Groups pages by (lccn, year) and averages page_channel_grid over each
/// group. Pages whose lccn is not in `allowed_lccns` are ignored (pass an
/// empty set to accept every title).
AggregateResult aggregate_composites(const std::vector<PageRecord>& pages,
                                     const std::set<std::string>& allowed_lccns,
                                     std::size_t rows, std::size_t cols, std::size_t min_pages,
                                     unsigned threads = 1);

/// `{lccn, year, page_count, rows, cols, channels: {class: [values...]}}` with
/// 9-significant-digit values.
std::string composite_to_json_line(const CompositeHeatmap& composite);
CompositeHeatmap composite_from_json_line(std::string_view line);

} // namespace mise
