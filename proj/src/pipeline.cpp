#include "mise/pipeline.hpp"

#include "mise/catalog.hpp"
#include "mise/error.hpp"
#include "mise/heatmap.hpp"
#include "mise/marc.hpp"
#include "mise/text.hpp"
#include "parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <thread>

namespace mise {

namespace fs = std::filesystem;

// -- configuration ------------------------------------------------------------

void RunConfig::validate() const {
    filter().validate();
    if (rows < 1 || cols < 1) throw ConfigError("grid rows and cols must be positive");
    if (min_pages < 1) throw ConfigError("min_pages must be at least 1");
    for (double w : class_weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("class weights must be finite and non-negative");
    }
    parse_metric(metric);
    tsne_params().validate();
    const cluster::Method m = cluster::parse_method(cluster_method);
    if (m == cluster::Method::kmeans && k < 1) throw ConfigError("k must be at least 1");
    if (m == cluster::Method::dbscan && (!(eps > 0.0) || min_pts < 1)) throw ConfigError("dbscan needs eps > 0 and min_pts >= 1");
    render_style().validate();
    if (out.empty()) throw ConfigError("output directory must not be empty");
    if (run_id.empty() || run_id.find_first_of("/\\") != std::string::npos) throw ConfigError("run_id must be a plain file-name fragment");
}

FilterCriteria RunConfig::filter() const {
    FilterCriteria f;
    f.front_page_only = front_page_only;
    f.min_score = min_score;
    f.year_range = {year_start, year_end};
    return f;
}

tsne::TsneParams RunConfig::tsne_params() const {
    tsne::TsneParams p;
    p.perplexity = perplexity;
    p.iterations = iterations;
    p.early_exaggeration = early_exaggeration;
    p.exaggeration_iterations = exaggeration_iterations;
    p.learning_rate = learning_rate;
    p.momentum = momentum;
    p.final_momentum = final_momentum;
    p.momentum_switch_iteration = momentum_switch_iteration;
    p.adaptive_gains = adaptive_gains;
    p.seed = seed;
    p.threads = worker_count();
    return p;
}

render::RenderStyle RunConfig::render_style() const {
    render::RenderStyle s;
    s.cell_px = cell_px;
    s.point_radius = point_radius;
    s.label_mode = render::parse_label_mode(label_mode);
    s.color_by = render::parse_color_by(color_by);
    return s;
}

unsigned RunConfig::worker_count() const {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

template <class T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw ConfigError("invalid value '" + std::string(value) + "' for " + std::string(key));
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    const std::string v = to_lower(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("invalid boolean '" + std::string(value) + "' for " + std::string(key));
}

std::vector<std::string> parse_list(std::string_view value) {
    std::vector<std::string> out;
    if (trim(value).empty()) return out;
    for (const std::string& part : split(value, ',')) out.push_back(trim(part));
    return out;
}

} // namespace

void apply_config_value(RunConfig& c, std::string_view raw_key, std::string_view raw_value) {
    std::string key = trim(raw_key);
    std::replace(key.begin(), key.end(), '-', '_');
    std::string value = trim(raw_value);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);

    if (key == "marc") c.marc = parse_list(value);
    else if (key == "editors") c.editors = value;
    else if (key == "predictions") c.predictions = value;
    else if (key == "out") c.out = value;
    else if (key == "run_id") c.run_id = value;
    else if (key == "ethnic_only") c.ethnic_only = parse_bool(key, value);
    else if (key == "front_page_only") c.front_page_only = parse_bool(key, value);
    else if (key == "min_score") c.min_score = parse_number<double>(key, value);
    else if (key == "year_start") c.year_start = parse_number<int>(key, value);
    else if (key == "year_end") c.year_end = parse_number<int>(key, value);
    else if (key == "rows") c.rows = parse_number<std::size_t>(key, value);
    else if (key == "cols") c.cols = parse_number<std::size_t>(key, value);
    else if (key == "min_pages") c.min_pages = parse_number<std::size_t>(key, value);
    else if (key == "class_weights") {
        const std::vector<std::string> parts = parse_list(value);
        if (parts.size() != kClassCount) throw ConfigError("class_weights needs 7 comma-separated values");
        for (std::size_t i = 0; i < kClassCount; ++i) c.class_weights[i] = parse_number<double>(key, parts[i]);
    }
    else if (key == "metric") c.metric = value;
    else if (key == "perplexity") c.perplexity = parse_number<double>(key, value);
    else if (key == "iterations") c.iterations = parse_number<int>(key, value);
    else if (key == "early_exaggeration") c.early_exaggeration = parse_number<double>(key, value);
    else if (key == "exaggeration_iterations") c.exaggeration_iterations = parse_number<int>(key, value);
    else if (key == "learning_rate") c.learning_rate = parse_number<double>(key, value);
    else if (key == "momentum") c.momentum = parse_number<double>(key, value);
    else if (key == "final_momentum") c.final_momentum = parse_number<double>(key, value);
    else if (key == "momentum_switch_iteration") c.momentum_switch_iteration = parse_number<int>(key, value);
    else if (key == "adaptive_gains") c.adaptive_gains = parse_bool(key, value);
    else if (key == "cluster_method") c.cluster_method = value;
    else if (key == "k") c.k = parse_number<std::size_t>(key, value);
    else if (key == "eps") c.eps = parse_number<double>(key, value);
    else if (key == "min_pts") c.min_pts = parse_number<std::size_t>(key, value);
    else if (key == "cell_px") c.cell_px = parse_number<int>(key, value);
    else if (key == "point_radius") c.point_radius = parse_number<double>(key, value);
    else if (key == "label_mode") c.label_mode = value;
    else if (key == "color_by") c.color_by = value;
    else if (key == "render_heatmaps") c.render_heatmaps = parse_bool(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "threads") c.threads = parse_number<unsigned>(key, value);
    else throw ConfigError("unknown configuration key '" + key + "'");
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
    std::size_t line_no = 0;
    for (const std::string& raw : split(text, '\n')) {
        ++line_no;
        std::string line = raw;
        if (const std::size_t hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        apply_config_value(base, line.substr(0, eq), line.substr(eq + 1));
    }
    return base;
}

std::string format_run_config(const RunConfig& c) {
    std::vector<std::string> weights;
    for (double w : c.class_weights) weights.push_back(fmt_double(w));
    std::string out;
    auto kv = [&](std::string_view k, const std::string& v) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    };
    kv("marc", join(c.marc, ","));
    kv("editors", c.editors);
    kv("predictions", c.predictions);
    kv("out", c.out);
    kv("run_id", c.run_id);
    kv("ethnic_only", fmt_bool(c.ethnic_only));
    kv("front_page_only", fmt_bool(c.front_page_only));
    kv("min_score", fmt_double(c.min_score));
    kv("year_start", std::to_string(c.year_start));
    kv("year_end", std::to_string(c.year_end));
    kv("rows", std::to_string(c.rows));
    kv("cols", std::to_string(c.cols));
    kv("min_pages", std::to_string(c.min_pages));
    kv("class_weights", join(weights, ","));
    kv("metric", c.metric);
    kv("perplexity", fmt_double(c.perplexity));
    kv("iterations", std::to_string(c.iterations));
    kv("early_exaggeration", fmt_double(c.early_exaggeration));
    kv("exaggeration_iterations", std::to_string(c.exaggeration_iterations));
    kv("learning_rate", fmt_double(c.learning_rate));
    kv("momentum", fmt_double(c.momentum));
    kv("final_momentum", fmt_double(c.final_momentum));
    kv("momentum_switch_iteration", std::to_string(c.momentum_switch_iteration));
    kv("adaptive_gains", fmt_bool(c.adaptive_gains));
    kv("cluster_method", c.cluster_method);
    kv("k", std::to_string(c.k));
    kv("eps", fmt_double(c.eps));
    kv("min_pts", std::to_string(c.min_pts));
    kv("cell_px", std::to_string(c.cell_px));
    kv("point_radius", fmt_double(c.point_radius));
    kv("label_mode", c.label_mode);
    kv("color_by", c.color_by);
    kv("render_heatmaps", fmt_bool(c.render_heatmaps));
    kv("seed", std::to_string(c.seed));
    kv("threads", std::to_string(c.threads));
    return out;
}

// -- stages -------------------------------------------------------------------

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.code(), "[" + stage + "]: " + cause.what()), stage_(std::move(stage)) {}

namespace {

fs::path artifact(const RunConfig& c, std::string_view name) { return fs::path(c.out) / std::string(name); }

std::vector<std::string> read_lines(const fs::path& path) {
    std::vector<std::string> lines;
    for (std::string& l : split(read_file(path), '\n')) {
        if (!l.empty() && l.back() == '\r') l.pop_back();
        if (!trim(l).empty()) lines.push_back(std::move(l));
    }
    return lines;
}

std::vector<CompositeHeatmap> read_composites(const RunConfig& c) {
    std::vector<CompositeHeatmap> out;
    for (const std::string& line : read_lines(artifact(c, artifacts::composites))) out.push_back(composite_from_json_line(line));
    return out;
}

catalog::CorpusManifest read_manifest(const RunConfig& c) {
    return catalog::manifest_from_csv(read_file(artifact(c, artifacts::manifest)));
}

} // namespace

CorpusStats run_corpus(const RunConfig& c) {
    c.validate();
    if (c.marc.empty()) throw ConfigError("no MARC input files given");
    if (c.ethnic_only && c.editors.empty()) throw ConfigError("ethnic-only selection needs an editor list");

    std::vector<marc::TitleProfile> profiles;
    for (const std::string& path : c.marc) {
        for (const marc::MarcRecord& r : marc::read_marc_file(path)) profiles.push_back(marc::extract_title_profile(r));
    }
    catalog::EditorList editors;
    if (!c.editors.empty()) editors = catalog::load_editor_list(c.editors);

    const catalog::CorpusManifest manifest = catalog::build_corpus(profiles, editors.entries, c.ethnic_only, {c.year_start, c.year_end});
    const catalog::SuccessionGraph graph = catalog::build_succession_graph(profiles);

    std::string jsonl;
    for (const marc::TitleProfile& p : profiles) jsonl += marc::profile_to_json_line(p) + "\n";
    write_file(artifact(c, artifacts::profiles), jsonl);
    write_file(artifact(c, artifacts::manifest), catalog::manifest_to_csv(manifest));
    write_file(artifact(c, artifacts::succession), catalog::graph_to_csv(graph));

    std::string diag = catalog::diagnostics_report(manifest);
    diag += "duplicate editor rows: " + std::to_string(editors.duplicate_rows) + "\n";
    diag += "succession graph: " + std::to_string(graph.nodes.size()) + " nodes, " + std::to_string(graph.edges.size()) + " edges\n";
    diag += "dangling title-only links: " + std::to_string(graph.dangling.size()) + "\n";
    for (const catalog::DanglingReference& d : graph.dangling) diag += "  " + d.from + " " + d.raw_tag + " \"" + d.target_title + "\"\n";
    write_file(artifact(c, artifacts::corpus_diagnostics), diag);

    return {profiles.size(), manifest.entries.size(), manifest.provenance.editor_associations, graph.edges.size()};
}

HeatmapStats run_heatmaps(const RunConfig& c) {
    c.validate();
    if (c.predictions.empty()) throw ConfigError("no prediction file given");
    const catalog::CorpusManifest manifest = read_manifest(c);
    FilterCriteria criteria = c.filter();
    criteria.lccn_allowlist = manifest.lccns();

    std::ifstream in(c.predictions, std::ios::binary);
    if (!in) throw InputError("cannot open " + c.predictions);

    const unsigned workers = c.worker_count();
    std::vector<CompositeAccumulator> parts(workers, CompositeAccumulator(c.rows, c.cols));
    HeatmapStats stats;
    constexpr std::size_t kBatch = 4096;
    std::size_t line_no = 0;
    bool done = false;
    while (!done) {
        std::vector<std::pair<std::size_t, std::string>> batch;
        std::string line;
        while (batch.size() < kBatch) {
            if (!std::getline(in, line)) {
                done = true;
                break;
            }
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (trim(line).empty()) continue;
            batch.emplace_back(line_no, std::move(line));
        }
        std::vector<std::optional<PageRecord>> kept(batch.size());
        std::vector<IngestWarnings> warnings(batch.size());
        std::vector<std::exception_ptr> errors(batch.size());
        detail::parallel_for(batch.size(), workers, [&](std::size_t i) {
            try {
                kept[i] = filter_page(parse_prediction_line(batch[i].second, batch[i].first, warnings[i]), criteria);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (errors[i]) {
                try {
                    std::rethrow_exception(errors[i]);
                } catch (const RecordError& e) {
                    throw InputError(c.predictions + ": " + e.what());
                }
            }
            stats.warnings += warnings[i];
            ++stats.prediction_records;
            if (kept[i]) ++stats.pages_kept;
        }
        detail::parallel_for(workers, workers, [&](std::size_t w) {
            for (std::size_t i = w; i < batch.size(); i += workers) {
                if (kept[i]) parts[w].add_page(*kept[i]);
            }
        });
    }
    for (unsigned w = 1; w < workers; ++w) parts[0].merge(parts[w]);
    const auto result = parts[0].finish(c.min_pages);

    std::string jsonl;
    for (const CompositeHeatmap& h : result.composites) jsonl += composite_to_json_line(h) + "\n";
    write_file(artifact(c, artifacts::composites), jsonl);

    std::string report;
    report += "prediction records: " + std::to_string(stats.prediction_records) + "\n";
    report += "pages kept: " + std::to_string(stats.pages_kept) + "\n";
    report += "boxes dropped: " + std::to_string(stats.warnings.dropped_boxes) + "\n";
    report += "boxes clamped: " + std::to_string(stats.warnings.clamped_boxes) + "\n";
    report += "title-years: " + std::to_string(result.composites.size()) + "\n";
    report += "title-years below min_pages (" + std::to_string(c.min_pages) + "): " + std::to_string(result.dropped.size()) + "\n";
    for (const auto& [key, pages] : result.dropped) {
        report += "  " + key.first + ":" + std::to_string(key.second) + " (" + std::to_string(pages) + " pages)\n";
    }
    write_file(artifact(c, artifacts::heatmap_report), report);

    stats.title_years = result.composites.size();
    stats.title_years_dropped = result.dropped.size();
    return stats;
}

DistanceStats run_distances(const RunConfig& c) {
    c.validate();
    std::vector<LayoutVector> vectors;
    for (const CompositeHeatmap& h : read_composites(c)) {
        if (h.rows() != c.rows || h.cols() != c.cols)
            throw InputError("composite " + h.lccn + ":" + std::to_string(h.year) + " does not match the configured grid");
        vectors.push_back(vectorize(h, c.class_weights));
    }
    DistanceMatrix m;
    if (vectors.size() >= 2) {
        m = distance_matrix(std::move(vectors), parse_metric(c.metric), c.worker_count());
    } else {
        // Too few title-years for a matrix; the embed stage reports it.
        for (const LayoutVector& v : vectors) m.ids.push_back(v.id);
        m.d.assign(m.ids.size() * m.ids.size(), 0.0);
    }
    write_file(artifact(c, artifacts::distances), distance_matrix_to_csv(m));
    return {m.size()};
}

EmbedStats run_embed(const RunConfig& c) {
    c.validate();
    const DistanceMatrix d = distance_matrix_from_csv(read_file(artifact(c, artifacts::distances)));
    if (d.size() < 4) throw InputError("embedding needs at least 4 title-years, got fewer than 4 points (" + std::to_string(d.size()) + ")");
    tsne::AffinityResult aff = tsne::build_affinities(d, c.perplexity);
    tsne::Embedding e = tsne::optimize(aff.affinities, c.tsne_params());
    e.ids = d.ids;
    write_file(artifact(c, artifacts::embedding), tsne::embedding_to_csv(e));

    nlohmann::ordered_json meta;
    meta["points"] = e.size();
    meta["perplexity"] = c.perplexity;
    meta["effective_perplexity"] = aff.effective_perplexity;
    meta["iterations"] = c.iterations;
    meta["early_exaggeration"] = c.early_exaggeration;
    meta["exaggeration_iterations"] = c.exaggeration_iterations;
    meta["learning_rate"] = c.learning_rate;
    meta["momentum"] = c.momentum;
    meta["final_momentum"] = c.final_momentum;
    meta["momentum_switch_iteration"] = c.momentum_switch_iteration;
    meta["adaptive_gains"] = c.adaptive_gains;
    meta["seed"] = c.seed;
    meta["rng"] = "mt19937_64 + Box-Muller";
    meta["initial_kl"] = e.initial_kl;
    meta["final_kl"] = e.final_kl;
    meta["iterations_run"] = e.iterations_run;
    meta["warnings"] = aff.warnings;
    write_file(artifact(c, artifacts::embedding_meta), meta.dump(2) + "\n");

    return {e.size(), e.initial_kl, e.final_kl, aff.effective_perplexity, aff.warnings};
}

ClusterStats run_cluster(const RunConfig& c) {
    c.validate();
    const tsne::Embedding e = tsne::embedding_from_csv(read_file(artifact(c, artifacts::embedding)));
    cluster::ClusterAssignment a = cluster::parse_method(c.cluster_method) == cluster::Method::kmeans
                                       ? cluster::kmeans(e.y, c.k, c.seed)
                                       : cluster::dbscan(e.y, c.eps, c.min_pts);
    a.ids = e.ids;
    write_file(artifact(c, artifacts::clusters), cluster::assignment_to_csv(a));
    write_file(artifact(c, artifacts::cluster_report), cluster::cluster_report(a, read_manifest(c)));

    ClusterStats s;
    std::set<int> labels;
    for (int l : a.labels) {
        if (l < 0) ++s.noise;
        else labels.insert(l);
    }
    s.clusters = labels.size();
    return s;
}

RenderStats run_render(const RunConfig& c) {
    c.validate();
    const render::RenderStyle style = c.render_style();
    const catalog::CorpusManifest manifest = read_manifest(c);
    RenderStats stats;
    const fs::path dir = artifact(c, artifacts::figures);
    auto emit = [&](const std::string& name, const std::string& svg) {
        write_file(dir / name, svg);
        stats.files.push_back(std::string(artifacts::figures) + "/" + name);
    };

    if (c.render_heatmaps) {
        for (const CompositeHeatmap& h : read_composites(c)) {
            for (ContentClass cls : kAllClasses) {
                const std::string stem = h.lccn + "_" + std::to_string(h.year) + "_" + std::string(class_name(cls));
                const catalog::ManifestEntry* entry = manifest.find(h.lccn);
                const std::string title = (entry != nullptr && !entry->title.empty() ? entry->title : h.lccn) + ", " +
                                          std::to_string(h.year) + ", " + std::string(class_name(cls)) + ", " +
                                          std::to_string(h.page_count) + " pages";
                emit(stem + ".svg", render::render_heatmap(h.channel(cls), style, title));
            }
        }
    }

    const tsne::Embedding e = tsne::embedding_from_csv(read_file(artifact(c, artifacts::embedding)));
    std::optional<cluster::ClusterAssignment> a;
    if (fs::exists(artifact(c, artifacts::clusters))) a = cluster::assignment_from_csv(read_file(artifact(c, artifacts::clusters)));
    emit("constellation_" + c.run_id + ".svg", render::render_constellation(e, a ? &*a : nullptr, manifest, style));
    return stats;
}

std::string PipelineSummary::text() const {
    std::string out;
    out += "marc records seen: " + std::to_string(corpus.marc_records) + "\n";
    out += "manifest titles: " + std::to_string(corpus.manifest_entries) + "\n";
    out += "editor associations: " + std::to_string(corpus.editor_associations) + "\n";
    out += "prediction records seen: " + std::to_string(heatmaps.prediction_records) + "\n";
    out += "pages kept: " + std::to_string(heatmaps.pages_kept) + "\n";
    out += "title-years: " + std::to_string(heatmaps.title_years) + "\n";
    out += "title-years dropped: " + std::to_string(heatmaps.title_years_dropped) + "\n";
    out += "embedded points: " + std::to_string(embed.points) + "\n";
    out += "final kl: " + format_sig9(embed.final_kl) + "\n";
    out += "clusters: " + std::to_string(clusters.clusters) + "\n";
    out += "artifacts:\n";
    for (std::string_view name : {artifacts::run_config, artifacts::profiles, artifacts::manifest, artifacts::corpus_diagnostics,
                                  artifacts::succession, artifacts::composites, artifacts::heatmap_report, artifacts::distances,
                                  artifacts::embedding, artifacts::embedding_meta, artifacts::clusters, artifacts::cluster_report}) {
        out += "  " + std::string(name) + "\n";
    }
    for (const std::string& f : render.files) out += "  " + f + "\n";
    return out;
}

PipelineSummary run_pipeline(const RunConfig& config) {
    config.validate();
    write_file(artifact(config, artifacts::run_config), format_run_config(config));
    PipelineSummary s;
    auto stage = [](const char* name, auto&& fn) {
        try {
            return fn();
        } catch (const StageError&) {
            throw;
        } catch (const Error& e) {
            throw StageError(name, e);
        } catch (const std::filesystem::filesystem_error& e) {
            throw StageError(name, InputError(e.what()));
        }
    };
    s.corpus = stage("corpus", [&] { return run_corpus(config); });
    s.heatmaps = stage("heatmaps", [&] { return run_heatmaps(config); });
    s.distances = stage("distances", [&] { return run_distances(config); });
    s.embed = stage("embed", [&] { return run_embed(config); });
    s.clusters = stage("cluster", [&] { return run_cluster(config); });
    s.render = stage("render", [&] { return run_render(config); });
    write_file(artifact(config, artifacts::run_summary), s.text());
    return s;
}

} // namespace mise
