#include "mise/heatmap.hpp"

#include "mise/error.hpp"
#include "mise/simd/kernels.hpp"
#include "mise/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <thread>

namespace mise {

double Grid::max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }

double Grid::sum() const { return simd::active().sum(values.data(), values.size()); }

namespace {

// Fraction of each of `cells` equal intervals of [0,1] covered by [lo, hi].
// Works in cell units so cell boundaries are exact integers.
std::vector<double> axis_coverage(double lo, double hi, std::size_t cells) {
    std::vector<double> f(cells, 0.0);
    const double n = static_cast<double>(cells);
    const double u1 = lo * n;
    const double u2 = hi * n;
    const auto first = static_cast<std::size_t>(std::clamp(std::floor(u1), 0.0, n));
    const auto last = static_cast<std::size_t>(std::clamp(std::ceil(u2), 0.0, n));
    for (std::size_t c = first; c < last; ++c) {
        const double cell_lo = static_cast<double>(c);
        f[c] = std::max(0.0, std::min(u2, cell_lo + 1.0) - std::max(u1, cell_lo));
    }
    return f;
}

// dst = min(1, dst + rasterize(box)), row by row.
void accumulate_box(Grid& dst, const BoundingBox& box, const simd::KernelTable& k) {
    const std::vector<double> fx = axis_coverage(box.x1, box.x2, dst.cols);
    const std::vector<double> fy = axis_coverage(box.y1, box.y2, dst.rows);
    for (std::size_t r = 0; r < dst.rows; ++r) {
        if (fy[r] == 0.0) continue;
        k.saturating_axpy(dst.values.data() + r * dst.cols, fx.data(), fy[r], dst.cols);
    }
}

void check_dims(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw ConfigError("grid dimensions must be positive");
}

constexpr double kFixedScale = 0x1.0p40;

} // namespace

Grid rasterize_box(const BoundingBox& box, std::size_t rows, std::size_t cols) {
    check_dims(rows, cols);
    Grid g(rows, cols);
    accumulate_box(g, box, simd::active());
    return g;
}

Grid page_channel_grid(const PageRecord& page, ContentClass cls, std::size_t rows, std::size_t cols) {
    check_dims(rows, cols);
    Grid g(rows, cols);
    const simd::KernelTable& k = simd::active();
    for (const BoundingBox& b : page.boxes) {
        if (b.cls == cls) accumulate_box(g, b, k);
    }
    return g;
}

CompositeAccumulator::CompositeAccumulator(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    check_dims(rows, cols);
}

void CompositeAccumulator::add_page(const PageRecord& page) {
    Sums& s = sums_[{page.lccn, page.issue_date.year}];
    const std::size_t cells = rows_ * cols_;
    if (s.cells.empty()) s.cells.assign(kClassCount * cells, 0);
    ++s.pages;
    for (ContentClass cls : kAllClasses) {
        const bool present = std::any_of(page.boxes.begin(), page.boxes.end(), [&](const BoundingBox& b) { return b.cls == cls; });
        if (!present) continue;
        const Grid g = page_channel_grid(page, cls, rows_, cols_);
        std::int64_t* dst = s.cells.data() + class_index(cls) * cells;
        for (std::size_t i = 0; i < cells; ++i) dst[i] += std::llround(g.values[i] * kFixedScale);
    }
}

void CompositeAccumulator::merge(const CompositeAccumulator& other) {
    if (other.rows_ != rows_ || other.cols_ != cols_) throw ConfigError("cannot merge accumulators with different grid dimensions");
    for (const auto& [key, src] : other.sums_) {
        Sums& dst = sums_[key];
        if (dst.cells.empty()) dst.cells.assign(src.cells.size(), 0);
        dst.pages += src.pages;
        for (std::size_t i = 0; i < src.cells.size(); ++i) dst.cells[i] += src.cells[i];
    }
}

CompositeAccumulator::Result CompositeAccumulator::finish(std::size_t min_pages) const {
    Result out;
    const std::size_t cells = rows_ * cols_;
    for (const auto& [key, s] : sums_) {
        if (s.pages < min_pages) {
            out.dropped.emplace_back(key, s.pages);
            continue;
        }
        CompositeHeatmap c;
        c.lccn = key.first;
        c.year = key.second;
        c.page_count = s.pages;
        const double pages = static_cast<double>(s.pages);
        for (std::size_t k = 0; k < kClassCount; ++k) {
            Grid g(rows_, cols_);
            for (std::size_t i = 0; i < cells; ++i) {
                g.values[i] = static_cast<double>(s.cells[k * cells + i]) / kFixedScale / pages;
            }
            c.channels[k] = std::move(g);
        }
        out.composites.push_back(std::move(c));
    }
    return out;
}

AggregateResult aggregate_composites(const std::vector<PageRecord>& pages, const std::set<std::string>& allowed_lccns,
                                     std::size_t rows, std::size_t cols, std::size_t min_pages, unsigned threads) {
    if (min_pages < 1) throw ConfigError("min_pages must be at least 1");
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(pages.size() / 64 + 1)));
    std::vector<CompositeAccumulator> parts(workers, CompositeAccumulator(rows, cols));
    auto work = [&](unsigned w) {
        for (std::size_t i = w; i < pages.size(); i += workers) {
            if (allowed_lccns.empty() || allowed_lccns.contains(pages[i].lccn)) parts[w].add_page(pages[i]);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (unsigned w = 1; w < workers; ++w) parts[0].merge(parts[w]);
    auto result = parts[0].finish(min_pages);
    return {std::move(result.composites), std::move(result.dropped)};
}

std::string composite_to_json_line(const CompositeHeatmap& c) {
    std::string out = "{\"lccn\":" + nlohmann::json(c.lccn).dump() + ",\"year\":" + std::to_string(c.year) +
                      ",\"page_count\":" + std::to_string(c.page_count) + ",\"rows\":" + std::to_string(c.rows()) +
                      ",\"cols\":" + std::to_string(c.cols()) + ",\"channels\":{";
    for (std::size_t k = 0; k < kClassCount; ++k) {
        if (k) out += ',';
        out += '"';
        out += class_name(kAllClasses[k]);
        out += "\":[";
        const std::vector<double>& v = c.channels[k].values;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ',';
            out += format_sig9(v[i]);
        }
        out += ']';
    }
    out += "}}";
    return out;
}

CompositeHeatmap composite_from_json_line(std::string_view line) {
    try {
        const nlohmann::json j = nlohmann::json::parse(line);
        CompositeHeatmap c;
        c.lccn = j.at("lccn").get<std::string>();
        c.year = j.at("year").get<int>();
        c.page_count = j.at("page_count").get<std::size_t>();
        const auto rows = j.at("rows").get<std::size_t>();
        const auto cols = j.at("cols").get<std::size_t>();
        if (rows == 0 || cols == 0) throw InputError("composite " + c.lccn + ": empty grid");
        const auto& channels = j.at("channels");
        for (ContentClass cls : kAllClasses) {
            Grid g(rows, cols);
            g.values = channels.at(std::string(class_name(cls))).get<std::vector<double>>();
            if (g.values.size() != rows * cols)
                throw InputError("composite " + c.lccn + ":" + std::to_string(c.year) + ": channel " +
                                 std::string(class_name(cls)) + " has wrong length");
            c.channels[class_index(cls)] = std::move(g);
        }
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed composite record: ") + e.what());
    }
}

} // namespace mise
