#include "mise/similarity.hpp"

#include "mise/csv.hpp"
#include "mise/error.hpp"
#include "mise/simd/kernels.hpp"
#include "mise/text.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace mise {

std::string TitleYear::str() const { return lccn + ":" + std::to_string(year); }

TitleYear parse_title_year(std::string_view text) {
    const std::size_t colon = text.rfind(':');
    if (colon == std::string_view::npos || colon == 0) throw InputError("invalid title-year id '" + std::string(text) + "'");
    TitleYear id{std::string(text.substr(0, colon)), 0};
    const std::string_view y = text.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(y.data(), y.data() + y.size(), id.year);
    if (ec != std::errc() || ptr != y.data() + y.size()) throw InputError("invalid year in id '" + std::string(text) + "'");
    return id;
}

LayoutVector vectorize(const CompositeHeatmap& composite, const ClassWeights& weights) {
    const std::size_t cells = composite.rows() * composite.cols();
    for (std::size_t k = 0; k < kClassCount; ++k) {
        const Grid& g = composite.channels[k];
        if (g.rows != composite.rows() || g.cols != composite.cols() || g.values.size() != cells)
            throw InputError("composite " + composite.lccn + ":" + std::to_string(composite.year) + " has mismatched channel dimensions");
        if (!(weights[k] >= 0.0) || !std::isfinite(weights[k])) throw ConfigError("class weights must be finite and non-negative");
    }
    LayoutVector v{{composite.lccn, composite.year}, std::vector<double>(kClassCount * cells), weights};
    for (std::size_t k = 0; k < kClassCount; ++k) {
        const std::vector<double>& src = composite.channels[k].values;
        std::transform(src.begin(), src.end(), v.values.begin() + static_cast<std::ptrdiff_t>(k * cells),
                       [w = weights[k]](double x) { return w * x; });
    }
    return v;
}

Metric parse_metric(std::string_view name) {
    if (name == "l2") return Metric::l2;
    if (name == "l1") return Metric::l1;
    throw ConfigError("unknown metric '" + std::string(name) + "' (expected l2 or l1)");
}

std::string_view metric_name(Metric m) { return m == Metric::l2 ? "l2" : "l1"; }

namespace {

double kernel_distance(const simd::KernelTable& k, const LayoutVector& a, const LayoutVector& b, Metric metric) {
    if (a.values.size() != b.values.size())
        throw InputError("layout vectors differ in length (" + std::to_string(a.values.size()) + " vs " + std::to_string(b.values.size()) + ")");
    if (a.class_weights != b.class_weights) throw InputError("layout vectors were built with different class weights");
    const std::size_t n = a.values.size();
    return metric == Metric::l2 ? std::sqrt(k.squared_l2(a.values.data(), b.values.data(), n))
                                : k.l1(a.values.data(), b.values.data(), n);
}

} // namespace

double distance(const LayoutVector& a, const LayoutVector& b, Metric metric) {
    return kernel_distance(simd::active(), a, b, metric);
}

DistanceMatrix distance_matrix(std::vector<LayoutVector> vectors, Metric metric, unsigned threads) {
    if (vectors.size() < 2) throw InputError("distance matrix needs at least 2 vectors, got " + std::to_string(vectors.size()));
    std::stable_sort(vectors.begin(), vectors.end(), [](const LayoutVector& a, const LayoutVector& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < vectors.size(); ++i) {
        if (vectors[i].id == vectors[i - 1].id) throw InputError("duplicate title-year " + vectors[i].id.str());
        if (vectors[i].values.size() != vectors[0].values.size()) throw InputError("layout vectors must share one length");
    }
    const std::size_t n = vectors.size();
    DistanceMatrix m;
    for (const LayoutVector& v : vectors) m.ids.push_back(v.id);
    m.d.assign(n * n, 0.0);
    const simd::KernelTable& k = simd::active();
    detail::parallel_for(n, threads, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < n; ++j) m.d[i * n + j] = kernel_distance(k, vectors[i], vectors[j], metric);
    });
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) m.d[i * n + j] = m.d[j * n + i];
    }
    return m;
}

std::string distance_matrix_to_csv(const DistanceMatrix& m) {
    csv::Row header;
    for (const TitleYear& id : m.ids) header.push_back(id.str());
    std::string out = csv::format_row(header);
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i) {
        csv::Row row;
        for (std::size_t j = 0; j < n; ++j) row.push_back(format_sig9(m.at(i, j)));
        out += csv::format_row(row);
    }
    return out;
}

DistanceMatrix distance_matrix_from_csv(std::string_view text) {
    const std::vector<csv::Row> rows = csv::parse(text);
    DistanceMatrix m;
    if (rows.empty()) return m;
    for (const std::string& h : rows[0]) {
        if (!h.empty()) m.ids.push_back(parse_title_year(h));
    }
    const std::size_t n = m.ids.size();
    if (rows.size() != n + 1) throw InputError("distance matrix: expected " + std::to_string(n) + " data rows");
    m.d.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i + 1].size() != n) throw InputError("distance matrix row " + std::to_string(i + 1) + ": expected " + std::to_string(n) + " values");
        for (std::size_t j = 0; j < n; ++j) {
            const std::string& cell = rows[i + 1][j];
            double v = 0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size() || !(v >= 0.0))
                throw InputError("distance matrix: invalid value '" + cell + "'");
            m.d[i * n + j] = v;
        }
    }
    return m;
}

} // namespace mise
