#pragma once

#include "mise/cluster.hpp"
#include "mise/error.hpp"
#include "mise/embed.hpp"
#include "mise/ingest.hpp"
#include "mise/render.hpp"
#include "mise/similarity.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mise {

/// Every tunable of the pipeline plus input and output paths.
struct RunConfig {
    // inputs and outputs
    std::vector<std::string> marc;
    std::string editors;
    std::string predictions;
    std::string out = "out";
    std::string run_id = "main";

    // corpus
    bool ethnic_only = true;

    // ingestion and heatmaps
    bool front_page_only = true;
    double min_score = 0.5;
    int year_start = 1890;
    int year_end = 1909;
    std::size_t rows = 64;
    std::size_t cols = 48;
    std::size_t min_pages = 5;

    // similarity
    ClassWeights class_weights = kUnitWeights;
    std::string metric = "l2";

    // embedding
    double perplexity = 30.0;
    int iterations = 1000;
    double early_exaggeration = 12.0;
    int exaggeration_iterations = 250;
    double learning_rate = 200.0;
    double momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch_iteration = 250;
    bool adaptive_gains = true;

    // clustering
    std::string cluster_method = "kmeans";
    std::size_t k = 3;
    double eps = 5.0;
    std::size_t min_pts = 4;

    // rendering
    int cell_px = 8;
    double point_radius = 4.0;
    std::string label_mode = "year";
    std::string color_by = "cluster";
    bool render_heatmaps = true;

    std::uint64_t seed = 42;
    unsigned threads = 0;  // 0 = hardware concurrency

    /// Throws ConfigError on any invalid value.
    void validate() const;

    FilterCriteria filter() const;
    tsne::TsneParams tsne_params() const;
    render::RenderStyle render_style() const;
    unsigned worker_count() const;

    bool operator==(const RunConfig&) const = default;
};

/// `key = value` lines; `#` starts a comment. Keys match the long flag names
/// with dashes replaced by underscores.
std::string format_run_config(const RunConfig& config);
RunConfig parse_run_config(std::string_view text, RunConfig base = {});

/// Applies one `key = value` pair. Throws ConfigError for unknown keys or bad values.
void apply_config_value(RunConfig& config, std::string_view key, std::string_view value);

// Artifact file names inside the output directory.
namespace artifacts {
inline constexpr std::string_view profiles = "profiles.jsonl";
inline constexpr std::string_view manifest = "manifest.csv";
inline constexpr std::string_view corpus_diagnostics = "corpus_diagnostics.txt";
inline constexpr std::string_view succession = "succession.csv";
inline constexpr std::string_view composites = "composites.jsonl";
inline constexpr std::string_view heatmap_report = "heatmaps_report.txt";
inline constexpr std::string_view distances = "distances.csv";
inline constexpr std::string_view embedding = "embedding.csv";
inline constexpr std::string_view embedding_meta = "embedding_meta.json";
inline constexpr std::string_view clusters = "clusters.csv";
inline constexpr std::string_view cluster_report = "cluster_report.txt";
inline constexpr std::string_view figures = "figures";
inline constexpr std::string_view run_config = "run_config.txt";
inline constexpr std::string_view run_summary = "run_summary.txt";
}  // namespace artifacts

/// An error raised inside a named stage.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& cause);
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct CorpusStats {
    std::size_t marc_records = 0;
    std::size_t manifest_entries = 0;
    std::size_t editor_associations = 0;
    std::size_t graph_edges = 0;
};

struct HeatmapStats {
    std::size_t prediction_records = 0;
    std::size_t pages_kept = 0;
    std::size_t title_years = 0;
    std::size_t title_years_dropped = 0;
    IngestWarnings warnings;
};

struct DistanceStats {
    std::size_t vectors = 0;
};

struct EmbedStats {
    std::size_t points = 0;
    double initial_kl = 0;
    double final_kl = 0;
    double effective_perplexity = 0;
    std::vector<std::string> warnings;
};

struct ClusterStats {
    std::size_t clusters = 0;
    std::size_t noise = 0;
};

struct RenderStats {
    std::vector<std::string> files;  // relative to the output directory
};

// Each stage reads the artifacts of earlier stages from `config.out` and
// writes its own there, so running stages one by one equals `run_pipeline`.
CorpusStats run_corpus(const RunConfig& config);
HeatmapStats run_heatmaps(const RunConfig& config);
DistanceStats run_distances(const RunConfig& config);
EmbedStats run_embed(const RunConfig& config);
ClusterStats run_cluster(const RunConfig& config);
RenderStats run_render(const RunConfig& config);

struct PipelineSummary {
    CorpusStats corpus;
    HeatmapStats heatmaps;
    DistanceStats distances;
    EmbedStats embed;
    ClusterStats clusters;
    RenderStats render;

    std::string text() const;
};

/// Runs every stage in order and writes `run_config.txt` and `run_summary.txt`.
/// A failing stage throws StageError; artifacts of completed stages are kept.
PipelineSummary run_pipeline(const RunConfig& config);

} // namespace mise
