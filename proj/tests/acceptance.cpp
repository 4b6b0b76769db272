// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include "fixtures.hpp"

#include "mise/catalog.hpp"
#include "mise/cluster.hpp"
#include "mise/embed.hpp"
#include "mise/heatmap.hpp"
#include "mise/marc.hpp"
#include "mise/pipeline.hpp"
#include "mise/random.hpp"
#include "mise/similarity.hpp"
#include "mise/text.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>

using namespace mise;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& why) {
        if (!ok && pass) {
            pass = false;
            detail = why;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// -- 1 ------------------------------------------------------------------------
Outcome marc_roundtrip() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto set = testing::marc_fixture_set();
    o.require(set.size() >= 10, "fewer than 10 fixture records");
    std::vector<marc::MarcRecord> parsed;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const std::string bytes = testing::assemble_iso2709(set[i]);
        parsed.push_back(marc::parse_iso2709(bytes));
        o.require(marc::serialize_iso2709(parsed.back()) == bytes, "record " + std::to_string(i) + " not byte-identical");
    }
    const std::string hand = testing::test_title_fixture();
    o.require(marc::serialize_iso2709(marc::parse_iso2709(hand)) == hand, "53-byte fixture not byte-identical");
    o.require(marc::parse_marcxml(testing::assemble_marcxml(set)) == parsed, "MARCXML records differ from ISO 2709");
    const double s = seconds_since(t0);
    o.require(s < 1.0, "took " + fmt("%.3f", s) + " s");
    if (o.pass) o.detail = std::to_string(set.size()) + " records, " + fmt("%.3f s", s);
    return o;
}

// -- 2 ------------------------------------------------------------------------
Outcome mass_conservation() {
    Outcome o;
    const auto t0 = Clock::now();
    Random rng(2024);
    double worst_mass = 0, worst_double = 0;
    for (int t = 0; t < 10000; ++t) {
        double x1 = rng.uniform(), x2 = rng.uniform(), y1 = rng.uniform(), y2 = rng.uniform();
        if (x1 > x2) std::swap(x1, x2);
        if (y1 > y2) std::swap(y1, y2);
        if (x2 - x1 < 1e-9 || y2 - y1 < 1e-9) continue;
        const BoundingBox b{x1, y1, x2, y2, ContentClass::headline, 1.0};
        const std::size_t rows = 1 + rng.below(64), cols = 1 + rng.below(64);
        const Grid g = rasterize_box(b, rows, cols);
        const double mass = std::accumulate(g.values.begin(), g.values.end(), 0.0) / static_cast<double>(rows * cols);
        worst_mass = std::max(worst_mass, std::fabs(mass - b.area()));
        const Grid f = rasterize_box(b, 2 * rows, 2 * cols);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                const double avg = 0.25 * (f.at(2 * r, 2 * c) + f.at(2 * r + 1, 2 * c) + f.at(2 * r, 2 * c + 1) + f.at(2 * r + 1, 2 * c + 1));
                worst_double = std::max(worst_double, std::fabs(avg - g.at(r, c)));
            }
    }
    const double s = seconds_since(t0);
    o.require(worst_mass <= 1e-12, "mass error " + fmt("%.3g", worst_mass));
    o.require(worst_double <= 1e-12, "doubling error " + fmt("%.3g", worst_double));
    o.require(s < 10.0, "took " + fmt("%.2f", s) + " s");
    if (o.pass) o.detail = "max mass error " + fmt("%.2g", worst_mass) + ", max doubling error " + fmt("%.2g", worst_double) + ", " + fmt("%.2f s", s);
    return o;
}

// -- 3 ------------------------------------------------------------------------
Outcome metric_axioms() {
    Outcome o;
    Random rng(3);
    double worst_oracle = 0, worst_triangle = -1e300;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 1 + rng.below(2000);
        LayoutVector v[3];
        for (auto& x : v) {
            x.values.resize(n);
            for (double& e : x.values) e = rng.uniform();
        }
        const double ab = distance(v[0], v[1]), ba = distance(v[1], v[0]);
        const double bc = distance(v[1], v[2]), ac = distance(v[0], v[2]);
        o.require(ab == ba, "asymmetric distance");
        o.require(distance(v[0], v[0]) == 0.0, "non-zero self-distance");
        worst_triangle = std::max(worst_triangle, ac - (ab + bc));
        long double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const long double d = static_cast<long double>(v[0].values[i]) - v[1].values[i];
            s += d * d;
        }
        worst_oracle = std::max(worst_oracle, std::fabs(ab - static_cast<double>(std::sqrt(s))));
    }
    o.require(worst_triangle <= 1e-9, "triangle violated by " + fmt("%.3g", worst_triangle));
    o.require(worst_oracle <= 1e-12, "oracle mismatch " + fmt("%.3g", worst_oracle));
    if (o.pass) o.detail = "1000 triples, max oracle deviation " + fmt("%.2g", worst_oracle);
    return o;
}

// -- 4 ------------------------------------------------------------------------
DistanceMatrix blob_matrix(std::size_t n, std::uint64_t seed) {
    Random rng(seed);
    std::vector<double> x(n * 5);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < 5; ++k) x[i * 5 + k] = rng.normal() + 6.0 * static_cast<double>((i % 3) == k);
    DistanceMatrix m;
    for (std::size_t i = 0; i < n; ++i) m.ids.push_back({"b" + std::to_string(100 + i), 1900});
    m.d.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0;
            for (std::size_t k = 0; k < 5; ++k) s += (x[i * 5 + k] - x[j * 5 + k]) * (x[i * 5 + k] - x[j * 5 + k]);
            m.d[i * n + j] = std::sqrt(s);
        }
    return m;
}

Outcome tsne_numerics(const fs::path& scratch) {
    Outcome o;
    // (a) calibration
    Random rng(4);
    double worst_rel = 0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 4 + rng.below(300);
        std::vector<double> d(n);
        const double scale = std::pow(10.0, 3.0 * rng.uniform() - 1.0);
        for (double& v : d) v = scale * rng.uniform();
        const double perp = 1.0 + rng.uniform() * (static_cast<double>(n) / 3.0);
        const auto c = tsne::calibrate_row(d, perp);
        double h = 0;
        for (double p : c.conditional)
            if (p > 0) h -= p * std::log2(p);
        worst_rel = std::max(worst_rel, std::fabs(std::exp2(h) - perp) / perp);
    }
    o.require(worst_rel <= 1e-5, "(a) perplexity error " + fmt("%.3g", worst_rel));

    // (b) finite differences at N = 10
    const auto p10 = tsne::build_affinities(blob_matrix(10, 7), 3.0).affinities;
    std::vector<double> y(20);
    for (double& v : y) v = rng.normal();
    const auto g = tsne::kl_gradient(p10, y);
    double num = 0, den = 0;
    for (std::size_t k = 0; k < 20; ++k) {
        auto yp = y, ym = y;
        yp[k] += 1e-6;
        ym[k] -= 1e-6;
        const double fd = (tsne::kl_divergence(p10, yp) - tsne::kl_divergence(p10, ym)) / 2e-6;
        num += (g[k] - fd) * (g[k] - fd);
        den += fd * fd;
    }
    const double rel = std::sqrt(num / den);
    o.require(rel < 1e-5, "(b) gradient relative error " + fmt("%.3g", rel));

    // (c) + (d) on synthetic corpora and the bundled fixture
    std::vector<DistanceMatrix> corpora = {blob_matrix(12, 1), blob_matrix(30, 2), blob_matrix(60, 3)};
    RunConfig mini = parse_run_config(read_file(fs::path(MISE_SOURCE_DIR) / "data/mini/mini.conf"));
    const fs::path root = MISE_SOURCE_DIR;
    for (auto& m : mini.marc) m = (root / m).string();
    mini.editors = (root / mini.editors).string();
    mini.predictions = (root / mini.predictions).string();
    mini.out = (scratch / "tsne_mini").string();
    run_corpus(mini);
    run_heatmaps(mini);
    run_distances(mini);
    corpora.push_back(distance_matrix_from_csv(read_file(fs::path(mini.out) / "distances.csv")));

    std::size_t corpus_no = 0;
    for (const DistanceMatrix& m : corpora) {
        const auto aff = tsne::build_affinities(m, 10.0);
        tsne::TsneParams params;
        params.perplexity = 10.0;
        const auto a = tsne::optimize(aff.affinities, params);
        const auto b = tsne::optimize(aff.affinities, params);
        const double initial = tsne::kl_divergence(aff.affinities, tsne::initial_layout(m.size(), params.seed));
        const double final_kl = tsne::kl_divergence(aff.affinities, a.y);
        o.require(final_kl < initial, "(c) KL did not decrease on corpus " + std::to_string(corpus_no));
        o.require(a.y == b.y, "(d) embeddings differ on corpus " + std::to_string(corpus_no));
        ++corpus_no;
    }
    if (o.pass) o.detail = "perplexity rel err " + fmt("%.2g", worst_rel) + ", gradient rel err " + fmt("%.2g", rel) + ", " +
                           std::to_string(corpora.size()) + " corpora";
    return o;
}

// -- 5 ------------------------------------------------------------------------
Outcome cluster_recovery(const fs::path& scratch) {
    Outcome o;
    const auto t0 = Clock::now();
    const fs::path dir = scratch / "archetypes";
    fs::create_directories(dir);
    const testing::ArchetypeCorpus corpus = testing::write_archetype_corpus(dir, 4, 5, 6, 7);
    const PipelineSummary s = run_pipeline(corpus.config);
    o.require(s.heatmaps.title_years == 60, "expected 60 title-years, got " + std::to_string(s.heatmaps.title_years));

    const auto e = tsne::embedding_from_csv(read_file(fs::path(corpus.config.out) / "embedding.csv"));
    const auto a = cluster::assignment_from_csv(read_file(fs::path(corpus.config.out) / "clusters.csv"));
    std::map<TitleYear, int> truth(corpus.truth.begin(), corpus.truth.end());
    std::vector<int> t;
    for (const auto& id : a.ids) t.push_back(truth.at(id));

    int perm[3] = {0, 1, 2};
    std::size_t best = 0;
    do {
        std::size_t ok = 0;
        for (std::size_t i = 0; i < t.size(); ++i) ok += a.labels[i] >= 0 && perm[a.labels[i]] == t[i];
        best = std::max(best, ok);
    } while (std::next_permutation(perm, perm + 3));
    const double agreement = static_cast<double>(best) / static_cast<double>(t.size());

    double within = 0, between = 0;
    std::size_t nw = 0, nb = 0;
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = i + 1; j < e.size(); ++j) {
            const double d = std::hypot(e.y[2 * i] - e.y[2 * j], e.y[2 * i + 1] - e.y[2 * j + 1]);
            if (truth.at(e.ids[i]) == truth.at(e.ids[j])) {
                within += d;
                ++nw;
            } else {
                between += d;
                ++nb;
            }
        }
    within /= static_cast<double>(nw);
    between /= static_cast<double>(nb);
    const double secs = seconds_since(t0);
    o.require(agreement >= 0.9, "agreement " + fmt("%.3f", agreement));
    o.require(within < between, "within " + fmt("%.3g", within) + " >= between " + fmt("%.3g", between));
    o.require(secs < 60.0, "took " + fmt("%.1f", secs) + " s");
    if (o.pass) o.detail = "agreement " + fmt("%.3f", agreement) + ", within " + fmt("%.3g", within) + " < between " + fmt("%.3g", between) + ", " + fmt("%.1f s", secs);
    return o;
}

// -- 6 ------------------------------------------------------------------------
Outcome determinism(const fs::path& scratch) {
    Outcome o;
    const fs::path root = MISE_SOURCE_DIR;
    RunConfig c = parse_run_config(read_file(root / "data/mini/mini.conf"));
    for (auto& m : c.marc) m = (root / m).string();
    c.editors = (root / c.editors).string();
    c.predictions = (root / c.predictions).string();
    c.out = (scratch / "determinism").string();
    run_pipeline(c);
    const auto first = testing::snapshot_tree(c.out);
    fs::remove_all(c.out);
    run_pipeline(c);
    const auto second = testing::snapshot_tree(c.out);
    o.require(first.size() == second.size(), "file sets differ");
    for (std::size_t i = 0; i < std::min(first.size(), second.size()); ++i) {
        o.require(first[i] == second[i], first[i].first + " differs");
    }
    if (o.pass) o.detail = std::to_string(first.size()) + " files byte-identical";
    return o;
}

// -- 7 ------------------------------------------------------------------------
Outcome corpus_join() {
    Outcome o;
    std::vector<marc::TitleProfile> profiles;
    std::vector<catalog::EditorEntry> editors;
    for (int i = 0; i < 207; ++i) {
        marc::TitleProfile p;
        p.lccn = "sn" + std::to_string(85000000 + i);
        p.title = "Title " + std::to_string(i);
        profiles.push_back(p);
    }
    // every title gets one editor, 102 of them a second
    for (int i = 0; i < 309; ++i) {
        editors.push_back({"sn" + std::to_string(85000000 + i % 207), "Editor " + std::to_string(i), "Group " + std::to_string(i % 11), std::nullopt});
    }
    const auto m = catalog::build_corpus(profiles, editors, true);
    o.require(m.entries.size() == 207, std::to_string(m.entries.size()) + " manifest entries");
    o.require(m.provenance.editor_associations == 309, std::to_string(m.provenance.editor_associations) + " editor associations");
    o.require(m.provenance.unmatched == 0 && m.provenance.unmatched_editor_lccns.empty(), "unmatched records");
    if (o.pass) o.detail = "207 entries, 309 editor associations, 0 unmatched";
    return o;
}

} // namespace

int main() {
    testing::TempDir scratch("acceptance");
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"MARC round-trip (ISO 2709 byte identity, MARCXML equivalence)", marc_roundtrip},
        {"rasterization mass conservation and resolution doubling", mass_conservation},
        {"distance metric axioms and brute-force oracle", metric_axioms},
        {"t-SNE calibration, gradient, KL decrease, reproducibility", [&] { return tsne_numerics(scratch.path()); }},
        {"synthetic archetype cluster recovery", [&] { return cluster_recovery(scratch.path()); }},
        {"end-to-end determinism on the mini fixture", [&] { return determinism(scratch.path()); }},
        {"corpus join sanity (207 titles, 309 editors)", corpus_join},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
        failed += !o.pass;
    }
    std::fflush(stdout);
    return failed == 0 ? 0 : 1;
}
