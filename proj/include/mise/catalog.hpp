#pragma once

#include "mise/ingest.hpp"
#include "mise/marc.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mise::catalog {

struct EditorEntry {
    std::string lccn;
    std::string editor_name;
    std::string group;
    std::optional<std::string> language;

    bool operator==(const EditorEntry&) const = default;
};

struct EditorList {
    std::vector<EditorEntry> entries;
    std::size_t duplicate_rows = 0;
};

/// Parses CSV with header `lccn,editor_name,group,language` (column order free).
EditorList parse_editor_list(std::string_view text);
EditorList load_editor_list(const std::filesystem::path& path);

struct ManifestEntry {
    std::string lccn;
    std::string title;
    std::vector<std::string> groups;
    std::vector<std::string> languages;
    std::vector<std::string> editors;
    YearRange selected_year_range;

    bool operator==(const ManifestEntry&) const = default;
};

struct Provenance {
    std::size_t seen = 0;
    std::size_t matched = 0;
    std::size_t unmatched = 0;
    std::size_t duplicate_profiles = 0;
    std::size_t editor_associations = 0;
    std::vector<std::string> unmatched_editor_lccns;
};

struct CorpusManifest {
    std::vector<ManifestEntry> entries;  // sorted by lccn, unique
    Provenance provenance;

    const ManifestEntry* find(std::string_view lccn) const;
    std::set<std::string> lccns() const;
};

CorpusManifest build_corpus(const std::vector<marc::TitleProfile>& profiles,
                            const std::vector<EditorEntry>& editors, bool ethnic_only,
                            YearRange years = {});

/// CSV `lccn,title,groups,languages`; multi-valued columns joined with ';'.
std::string manifest_to_csv(const CorpusManifest& manifest);
CorpusManifest manifest_from_csv(std::string_view text);
std::string diagnostics_report(const CorpusManifest& manifest);

enum class EdgeKind { succeeds, other_language_edition, translation_of };

std::string_view edge_kind_name(EdgeKind kind);

struct Edge {
    std::string from;
    std::string to;
    EdgeKind kind;

    auto operator<=>(const Edge&) const = default;
};

struct DanglingReference {
    std::string from;
    std::string target_title;
    std::string raw_tag;

    auto operator<=>(const DanglingReference&) const = default;
};

struct SuccessionGraph {
    std::set<std::string> nodes;
    std::vector<Edge> edges;  // sorted, unique
    std::vector<DanglingReference> dangling;

    /// Titles reachable from `lccn` by following `succeeds` edges forward,
    /// in breadth-first order.
    std::vector<std::string> successors(std::string_view lccn) const;
    std::vector<std::string> predecessors(std::string_view lccn) const;
};

/// One edge per link with a resolvable control number. 780 and 785 both map to
/// a `succeeds` edge from the earlier title to the later one, so reciprocal
/// pairs collapse.
SuccessionGraph build_succession_graph(const std::vector<marc::TitleProfile>& profiles);

/// CSV `from,to,kind`.
std::string graph_to_csv(const SuccessionGraph& graph);

} // namespace mise::catalog
