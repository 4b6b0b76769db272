// Command-line front end: one subcommand per stage plus `pipeline`.
#include "mise/error.hpp"
#include "mise/pipeline.hpp"
#include "mise/simd/kernels.hpp"
#include "mise/text.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace {

using mise::RunConfig;

// Long flag name, help text. Every flag maps 1:1 onto a config-file key.
struct Flag {
    const char* name;
    const char* help;
};

constexpr Flag kFlags[] = {
    {"editors", "editor list CSV (lccn,editor_name,group,language)"},
    {"predictions", "line-delimited prediction records"},
    {"out", "output directory"},
    {"run-id", "suffix for the constellation figure"},
    {"ethnic-only", "keep only titles with editor associations (true/false)"},
    {"front-page-only", "keep only page 1 (true/false)"},
    {"min-score", "minimum box confidence"},
    {"year-start", "first year kept"},
    {"year-end", "last year kept"},
    {"rows", "heatmap grid rows"},
    {"cols", "heatmap grid columns"},
    {"min-pages", "pages required per title-year"},
    {"class-weights", "7 comma-separated weights in class order"},
    {"metric", "l2 or l1"},
    {"perplexity", "t-SNE perplexity"},
    {"iterations", "t-SNE iterations"},
    {"early-exaggeration", "early exaggeration factor"},
    {"exaggeration-iterations", "iterations with exaggeration"},
    {"learning-rate", "gradient step size"},
    {"momentum", "initial momentum"},
    {"final-momentum", "momentum after the switch"},
    {"momentum-switch-iteration", "iteration of the momentum switch"},
    {"adaptive-gains", "per-coordinate adaptive gains (true/false)"},
    {"cluster-method", "kmeans or dbscan"},
    {"k", "number of k-means clusters"},
    {"eps", "dbscan neighbourhood radius"},
    {"min-pts", "dbscan core-point threshold"},
    {"cell-px", "heatmap cell size in pixels"},
    {"point-radius", "constellation point radius"},
    {"label-mode", "year, title, or none"},
    {"color-by", "cluster, group, or year"},
    {"render-heatmaps", "write per-class heatmap figures (true/false)"},
    {"seed", "seed for every random choice"},
    {"threads", "worker cap (0 = all cores)"},
};

std::string config_path_from_argv(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string_view a = argv[i];
        if (a == "--config" && i + 1 < argc) return argv[i + 1];
        if (a.starts_with("--config=")) return std::string(a.substr(9));
    }
    return {};
}

int run(int argc, char** argv) {
    RunConfig base;
    if (const std::string path = config_path_from_argv(argc, argv); !path.empty()) {
        std::string text;
        try {
            text = mise::read_file(path);
        } catch (const mise::Error& e) {
            throw mise::ConfigError(std::string("cannot read config file: ") + e.what());
        }
        base = mise::parse_run_config(text, base);
    }

    CLI::App app{"mise: layout similarity of historical newspaper pages"};
    app.require_subcommand(1);

    std::string config_file;
    std::string simd = "auto";
    std::vector<std::string> marc_files;
    std::map<std::string, std::string> values;
    bool all_titles = false;

    using Runner = std::function<void(const RunConfig&)>;
    std::vector<std::pair<CLI::App*, Runner>> commands;

    auto add = [&](const char* name, const char* help, Runner fn) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_file, "key = value config file; flags take precedence");
        sub->add_option("--simd", simd, "kernel set: auto, scalar, or avx2")->check(CLI::IsMember({"auto", "scalar", "avx2"}));
        sub->add_option("--marc", marc_files, "MARC files (.mrc ISO 2709 or .xml MARCXML)");
        sub->add_flag("--all-titles", all_titles, "same as --ethnic-only false");
        for (const Flag& f : kFlags) sub->add_option(std::string("--") + f.name, values[f.name], f.help);
        commands.emplace_back(sub, std::move(fn));
    };

    auto print = [](const std::string& s) { std::fputs(s.c_str(), stdout); };

    add("corpus", "MARC records + editor list -> manifest, profiles, succession graph", [&](const RunConfig& c) {
        const auto s = mise::run_corpus(c);
        print("marc records: " + std::to_string(s.marc_records) + "\nmanifest titles: " + std::to_string(s.manifest_entries) +
              "\neditor associations: " + std::to_string(s.editor_associations) + "\n");
    });
    add("heatmaps", "predictions -> composite heatmaps per title-year", [&](const RunConfig& c) {
        const auto s = mise::run_heatmaps(c);
        print("prediction records: " + std::to_string(s.prediction_records) + "\npages kept: " + std::to_string(s.pages_kept) +
              "\ntitle-years: " + std::to_string(s.title_years) + "\n");
    });
    add("distances", "composites -> pairwise distance matrix", [&](const RunConfig& c) {
        print("title-years: " + std::to_string(mise::run_distances(c).vectors) + "\n");
    });
    add("embed", "distance matrix -> 2-D t-SNE embedding", [&](const RunConfig& c) {
        const auto s = mise::run_embed(c);
        for (const std::string& w : s.warnings) std::cerr << "warning: " << w << "\n";
        print("points: " + std::to_string(s.points) + "\ninitial kl: " + mise::format_sig9(s.initial_kl) +
              "\nfinal kl: " + mise::format_sig9(s.final_kl) + "\n");
    });
    add("cluster", "embedding -> cluster labels and report", [&](const RunConfig& c) {
        const auto s = mise::run_cluster(c);
        print("clusters: " + std::to_string(s.clusters) + "\nnoise: " + std::to_string(s.noise) + "\n");
    });
    add("render", "heatmaps and constellation -> SVG figures", [&](const RunConfig& c) {
        for (const std::string& f : mise::run_render(c).files) print(f + "\n");
    });
    add("pipeline", "run every stage in order", [&](const RunConfig& c) {
        const auto s = mise::run_pipeline(c);
        for (const std::string& w : s.embed.warnings) std::cerr << "warning: " << w << "\n";
        print(s.text());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(mise::ExitCode::config);
    }

    RunConfig config = base;
    for (const auto& [sub, fn] : commands) {
        if (!sub->parsed()) continue;
        if (sub->count("--marc") > 0) config.marc = marc_files;
        for (const Flag& f : kFlags) {
            if (sub->count(std::string("--") + f.name) > 0) mise::apply_config_value(config, f.name, values[f.name]);
        }
        if (all_titles) config.ethnic_only = false;
        if (simd != "auto") mise::simd::select(simd == "avx2" ? mise::simd::Isa::avx2 : mise::simd::Isa::scalar);
        config.validate();
        try {
            fn(config);
        } catch (const mise::StageError&) {
            throw;
        } catch (const mise::Error& e) {
            throw mise::StageError(sub->get_name(), e);
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const mise::StageError& e) {
        std::cerr << "error " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const mise::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(mise::ExitCode::input);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
