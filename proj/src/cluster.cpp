#include "mise/cluster.hpp"

#include "mise/csv.hpp"
#include "mise/error.hpp"
#include "mise/random.hpp"
#include "mise/text.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <set>

namespace mise::cluster {

Method parse_method(std::string_view name) {
    if (name == "kmeans") return Method::kmeans;
    if (name == "dbscan") return Method::dbscan;
    throw ConfigError("unknown cluster method '" + std::string(name) + "' (expected kmeans or dbscan)");
}

std::string_view method_name(Method m) { return m == Method::kmeans ? "kmeans" : "dbscan"; }

namespace {

double sq_dist(std::span<const double> pts, std::size_t i, const double* c) {
    const double dx = pts[2 * i] - c[0];
    const double dy = pts[2 * i + 1] - c[1];
    return dx * dx + dy * dy;
}

std::size_t point_count(std::span<const double> points) {
    if (points.size() % 2 != 0) throw InputError("points must be n x 2");
    return points.size() / 2;
}

std::vector<double> seed_centers(std::span<const double> pts, std::size_t n, std::size_t k, Random& rng) {
    std::vector<double> centers;
    std::vector<bool> chosen(n, false);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    std::size_t pick = rng.below(n);
    for (std::size_t c = 0; c < k; ++c) {
        if (c > 0) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) total += d2[i];
            if (total > 0.0) {
                const double r = rng.uniform() * total;
                double acc = 0.0;
                pick = n;
                for (std::size_t i = 0; i < n; ++i) {
                    if (d2[i] == 0.0) continue;
                    acc += d2[i];
                    pick = i;
                    if (acc > r) break;
                }
            } else {
                // Every remaining point coincides with a centre: choose among unchosen ones.
                std::vector<std::size_t> rest;
                for (std::size_t i = 0; i < n; ++i) {
                    if (!chosen[i]) rest.push_back(i);
                }
                pick = rest[rng.below(rest.size())];
            }
        }
        chosen[pick] = true;
        centers.push_back(pts[2 * pick]);
        centers.push_back(pts[2 * pick + 1]);
        for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(pts, i, &centers[2 * c]));
    }
    return centers;
}

} // namespace

double within_cluster_ss(std::span<const double> points, const std::vector<int>& labels) {
    const std::size_t n = point_count(points);
    std::map<int, std::array<double, 3>> acc;  // sum x, sum y, count
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] < 0) continue;
        auto& a = acc[labels[i]];
        a[0] += points[2 * i];
        a[1] += points[2 * i + 1];
        a[2] += 1.0;
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] < 0) continue;
        const auto& a = acc[labels[i]];
        const double c[2] = {a[0] / a[2], a[1] / a[2]};
        ss += sq_dist(points, i, c);
    }
    return ss;
}

ClusterAssignment kmeans(std::span<const double> points, std::size_t k, std::uint64_t seed) {
    const std::size_t n = point_count(points);
    if (k < 1 || k > n) throw ConfigError("k = " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");

    Random rng(seed);
    std::vector<double> centers = seed_centers(points, n, k, rng);
    ClusterAssignment a;
    a.method = Method::kmeans;
    a.params_used = "k=" + std::to_string(k) + " seed=" + std::to_string(seed);
    a.labels.assign(n, -1);

    for (int it = 0; it < kMaxLloydIterations; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(points, i, &centers[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = sq_dist(points, i, &centers[2 * c]);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(c);
                }
            }
            if (a.labels[i] != best) {
                a.labels[i] = best;
                changed = true;
            }
        }
        a.objective_trace.push_back(within_cluster_ss(points, a.labels));
        if (!changed) break;

        std::vector<double> sums(3 * k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(a.labels[i]);
            sums[3 * c] += points[2 * i];
            sums[3 * c + 1] += points[2 * i + 1];
            sums[3 * c + 2] += 1.0;
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sums[3 * c + 2] == 0.0) continue;  // empty cluster keeps its centre
            centers[2 * c] = sums[3 * c] / sums[3 * c + 2];
            centers[2 * c + 1] = sums[3 * c + 1] / sums[3 * c + 2];
        }
    }
    return a;
}

ClusterAssignment dbscan(std::span<const double> points, double eps, std::size_t min_pts) {
    const std::size_t n = point_count(points);
    if (!(eps > 0.0)) throw ConfigError("dbscan eps must be positive");
    if (min_pts < 1) throw ConfigError("dbscan min_pts must be at least 1");

    const double eps2 = eps * eps;
    auto neighbours = [&](std::size_t i) {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < n; ++j) {
            if (sq_dist(points, j, &points[2 * i]) <= eps2) out.push_back(j);
        }
        return out;
    };

    constexpr int kUnvisited = -2;
    ClusterAssignment a;
    a.method = Method::dbscan;
    a.params_used = "eps=" + format_sig9(eps) + " min_pts=" + std::to_string(min_pts);
    a.labels.assign(n, kUnvisited);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (a.labels[i] != kUnvisited) continue;
        const std::vector<std::size_t> seeds = neighbours(i);
        if (seeds.size() < min_pts) {
            a.labels[i] = -1;
            continue;
        }
        const int label = next++;
        a.labels[i] = label;
        std::deque<std::size_t> queue(seeds.begin(), seeds.end());
        while (!queue.empty()) {
            const std::size_t j = queue.front();
            queue.pop_front();
            if (a.labels[j] == -1) a.labels[j] = label;  // border point
            if (a.labels[j] != kUnvisited) continue;
            a.labels[j] = label;
            const std::vector<std::size_t> more = neighbours(j);
            if (more.size() >= min_pts) queue.insert(queue.end(), more.begin(), more.end());
        }
    }
    return a;
}

std::string cluster_report(const ClusterAssignment& assignment, const catalog::CorpusManifest& manifest) {
    if (assignment.ids.empty()) return {};
    if (assignment.labels.size() != assignment.ids.size()) throw InputError("assignment labels do not align with ids");

    std::map<int, std::vector<TitleYear>> clusters;
    std::vector<std::pair<TitleYear, int>> unresolved;
    for (std::size_t i = 0; i < assignment.ids.size(); ++i) {
        const TitleYear& id = assignment.ids[i];
        if (manifest.find(id.lccn) == nullptr) {
            unresolved.emplace_back(id, assignment.labels[i]);
            continue;
        }
        clusters[assignment.labels[i]].push_back(id);
    }

    std::string out;
    out += "method: " + std::string(method_name(assignment.method)) + " (" + assignment.params_used + ")\n";
    for (auto& [label, members] : clusters) {
        std::sort(members.begin(), members.end());
        std::map<std::string, std::vector<int>> titles;
        std::set<std::string> groups;
        int y0 = members.front().year, y1 = members.front().year;
        for (const TitleYear& m : members) {
            titles[m.lccn].push_back(m.year);
            y0 = std::min(y0, m.year);
            y1 = std::max(y1, m.year);
            for (const std::string& g : manifest.find(m.lccn)->groups) groups.insert(g);
        }
        out += "\n";
        out += label < 0 ? std::string("noise\n") : "cluster " + std::to_string(label) + "\n";
        out += "  title-years: " + std::to_string(members.size()) + "\n";
        out += "  distinct titles: " + std::to_string(titles.size()) + "\n";
        out += "  years: " + std::to_string(y0) + "-" + std::to_string(y1) + "\n";
        out += "  groups: " + join(std::vector<std::string>(groups.begin(), groups.end()), "; ") + "\n";
        out += "  titles:\n";
        for (const auto& [lccn, years] : titles) {
            std::vector<std::string> ys;
            for (int y : years) ys.push_back(std::to_string(y));
            const std::string& title = manifest.find(lccn)->title;
            out += "    " + lccn + (title.empty() ? "" : " (" + title + ")") + ": " + join(ys, ", ") + "\n";
        }
    }
    if (!unresolved.empty()) {
        std::sort(unresolved.begin(), unresolved.end());
        out += "\nunresolved\n";
        for (const auto& [id, label] : unresolved) out += "  " + id.str() + " (label " + std::to_string(label) + ")\n";
    }
    return out;
}

std::string assignment_to_csv(const ClusterAssignment& a) {
    std::string out = csv::format_row({"lccn", "year", "label"});
    for (std::size_t i = 0; i < a.ids.size(); ++i) {
        out += csv::format_row({a.ids[i].lccn, std::to_string(a.ids[i].year), std::to_string(a.labels[i])});
    }
    return out;
}

ClusterAssignment assignment_from_csv(std::string_view text) {
    const std::vector<csv::Row> rows = csv::parse(text);
    if (rows.empty() || rows[0] != csv::Row{"lccn", "year", "label"}) throw InputError("clusters: expected header lccn,year,label");
    ClusterAssignment a;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 3) throw InputError("clusters row " + std::to_string(r + 1) + ": expected 3 columns");
        TitleYear id{rows[r][0], 0};
        int label = 0;
        auto parse_int = [&](const std::string& s, int& out) {
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            if (ec != std::errc() || ptr != s.data() + s.size()) throw InputError("clusters: invalid integer '" + s + "'");
        };
        parse_int(rows[r][1], id.year);
        parse_int(rows[r][2], label);
        a.ids.push_back(std::move(id));
        a.labels.push_back(label);
    }
    return a;
}

} // namespace mise::cluster
