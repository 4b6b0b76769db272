#include "mise/catalog.hpp"

#include "mise/csv.hpp"
#include "mise/error.hpp"
#include "mise/text.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace mise::catalog {

EditorList parse_editor_list(std::string_view text) {
    const std::vector<csv::Row> rows = csv::parse(text);
    if (rows.empty()) throw InputError("editor list is empty");

    std::map<std::string, std::size_t> column;
    for (std::size_t i = 0; i < rows[0].size(); ++i) column[to_lower(trim(rows[0][i]))] = i;
    for (const char* required : {"lccn", "editor_name", "group", "language"}) {
        if (!column.contains(required)) throw InputError(std::string("editor list header lacks column '") + required + "'");
    }
    const std::size_t c_lccn = column["lccn"], c_name = column["editor_name"], c_group = column["group"],
                      c_lang = column["language"];

    EditorList list;
    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const csv::Row& row = rows[r];
        auto cell = [&](std::size_t c) { return c < row.size() ? trim(row[c]) : std::string(); };
        EditorEntry e;
        e.lccn = marc::normalize_lccn(cell(c_lccn));
        e.editor_name = cell(c_name);
        e.group = cell(c_group);
        if (std::string lang = to_lower(cell(c_lang)); !lang.empty()) e.language = std::move(lang);
        if (e.lccn.empty()) throw InputError("editor list row " + std::to_string(r + 1) + ": empty lccn");
        if (e.editor_name.empty()) throw InputError("editor list row " + std::to_string(r + 1) + ": empty editor_name");
        if (!seen.emplace(e.lccn, e.editor_name).second) {
            ++list.duplicate_rows;
            continue;
        }
        list.entries.push_back(std::move(e));
    }
    return list;
}

EditorList load_editor_list(const std::filesystem::path& path) {
    try {
        return parse_editor_list(read_file(path));
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

const ManifestEntry* CorpusManifest::find(std::string_view lccn) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), lccn,
                               [](const ManifestEntry& e, std::string_view key) { return e.lccn < key; });
    return it != entries.end() && it->lccn == lccn ? &*it : nullptr;
}

std::set<std::string> CorpusManifest::lccns() const {
    std::set<std::string> out;
    for (const ManifestEntry& e : entries) out.insert(e.lccn);
    return out;
}

namespace {

void add_unique(std::vector<std::string>& v, const std::string& s) {
    if (!s.empty() && std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

} // namespace

CorpusManifest build_corpus(const std::vector<marc::TitleProfile>& profiles,
                            const std::vector<EditorEntry>& editors, bool ethnic_only, YearRange years) {
    std::map<std::string, std::vector<const EditorEntry*>> by_lccn;
    for (const EditorEntry& e : editors) by_lccn[e.lccn].push_back(&e);

    CorpusManifest m;
    std::map<std::string, ManifestEntry> entries;
    std::set<std::string> profile_lccns;
    for (const marc::TitleProfile& p : profiles) {
        ++m.provenance.seen;
        profile_lccns.insert(p.lccn);
        auto eds = by_lccn.find(p.lccn);
        const bool matched = eds != by_lccn.end();
        if (matched) {
            ++m.provenance.matched;
        } else {
            ++m.provenance.unmatched;
        }
        if (ethnic_only && !matched) continue;
        if (entries.contains(p.lccn)) {
            ++m.provenance.duplicate_profiles;
            continue;
        }
        ManifestEntry entry{p.lccn, p.title, {}, p.languages, {}, years};
        if (matched) {
            for (const EditorEntry* e : eds->second) {
                add_unique(entry.groups, e->group);
                if (e->language) add_unique(entry.languages, *e->language);
                entry.editors.push_back(e->editor_name);
            }
        }
        std::sort(entry.groups.begin(), entry.groups.end());
        m.provenance.editor_associations += entry.editors.size();
        entries.emplace(p.lccn, std::move(entry));
    }
    for (auto& [lccn, entry] : entries) m.entries.push_back(std::move(entry));
    for (const auto& [lccn, eds] : by_lccn) {
        if (!profile_lccns.contains(lccn)) m.provenance.unmatched_editor_lccns.push_back(lccn);
    }
    return m;
}

std::string manifest_to_csv(const CorpusManifest& manifest) {
    std::string out = csv::format_row({"lccn", "title", "groups", "languages"});
    for (const ManifestEntry& e : manifest.entries) {
        out += csv::format_row({e.lccn, e.title, join(e.groups, ";"), join(e.languages, ";")});
    }
    return out;
}

CorpusManifest manifest_from_csv(std::string_view text) {
    const std::vector<csv::Row> rows = csv::parse(text);
    if (rows.empty() || rows[0] != csv::Row{"lccn", "title", "groups", "languages"})
        throw InputError("manifest: expected header lccn,title,groups,languages");
    auto multi = [](const std::string& s) {
        std::vector<std::string> v;
        if (!s.empty()) v = split(s, ';');
        return v;
    };
    CorpusManifest m;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != 4) throw InputError("manifest row " + std::to_string(r + 1) + ": expected 4 columns");
        m.entries.push_back({rows[r][0], rows[r][1], multi(rows[r][2]), multi(rows[r][3]), {}, {}});
    }
    std::sort(m.entries.begin(), m.entries.end(), [](const auto& a, const auto& b) { return a.lccn < b.lccn; });
    m.provenance.seen = m.entries.size();
    m.provenance.matched = m.entries.size();
    return m;
}

std::string diagnostics_report(const CorpusManifest& m) {
    const Provenance& p = m.provenance;
    std::string out;
    out += "records seen: " + std::to_string(p.seen) + "\n";
    out += "matched: " + std::to_string(p.matched) + "\n";
    out += "unmatched: " + std::to_string(p.unmatched) + "\n";
    out += "duplicate profiles: " + std::to_string(p.duplicate_profiles) + "\n";
    out += "manifest entries: " + std::to_string(m.entries.size()) + "\n";
    out += "editor associations: " + std::to_string(p.editor_associations) + "\n";
    out += "editor lccns without a catalog record: " + std::to_string(p.unmatched_editor_lccns.size()) + "\n";
    for (const std::string& l : p.unmatched_editor_lccns) out += "  " + l + "\n";
    return out;
}

std::string_view edge_kind_name(EdgeKind kind) {
    switch (kind) {
    case EdgeKind::succeeds: return "succeeds";
    case EdgeKind::other_language_edition: return "other_language_edition";
    case EdgeKind::translation_of: return "translation_of";
    }
    return "unknown";
}

SuccessionGraph build_succession_graph(const std::vector<marc::TitleProfile>& profiles) {
    SuccessionGraph g;
    std::set<Edge> edges;
    std::set<DanglingReference> dangling;

    for (const marc::TitleProfile& p : profiles) {
        g.nodes.insert(p.lccn);
        auto visit = [&](const std::vector<marc::LinkEntry>& links, auto make_edge) {
            for (const marc::LinkEntry& l : links) {
                if (!l.target_lccn) {
                    dangling.insert({p.lccn, l.target_title.value_or(""), l.raw_tag});
                    continue;
                }
                g.nodes.insert(*l.target_lccn);
                edges.insert(make_edge(*l.target_lccn));
            }
        };
        // 780 on B naming A and 785 on A naming B both mean A -> B.
        visit(p.preceding, [&](const std::string& t) { return Edge{t, p.lccn, EdgeKind::succeeds}; });
        visit(p.succeeding, [&](const std::string& t) { return Edge{p.lccn, t, EdgeKind::succeeds}; });
        visit(p.other_language_editions, [&](const std::string& t) { return Edge{p.lccn, t, EdgeKind::other_language_edition}; });
        visit(p.translation_of, [&](const std::string& t) { return Edge{p.lccn, t, EdgeKind::translation_of}; });
    }
    g.edges.assign(edges.begin(), edges.end());
    g.dangling.assign(dangling.begin(), dangling.end());
    return g;
}

namespace {

std::vector<std::string> walk(const SuccessionGraph& g, std::string_view start, bool forward) {
    std::vector<std::string> order;
    std::set<std::string> visited{std::string(start)};
    std::deque<std::string> queue{std::string(start)};
    while (!queue.empty()) {
        const std::string cur = queue.front();
        queue.pop_front();
        for (const Edge& e : g.edges) {
            if (e.kind != EdgeKind::succeeds) continue;
            const std::string& from = forward ? e.from : e.to;
            const std::string& to = forward ? e.to : e.from;
            if (from == cur && visited.insert(to).second) {
                order.push_back(to);
                queue.push_back(to);
            }
        }
    }
    return order;
}

} // namespace

std::vector<std::string> SuccessionGraph::successors(std::string_view lccn) const { return walk(*this, lccn, true); }
std::vector<std::string> SuccessionGraph::predecessors(std::string_view lccn) const { return walk(*this, lccn, false); }

std::string graph_to_csv(const SuccessionGraph& g) {
    std::string out = csv::format_row({"from", "to", "kind"});
    for (const Edge& e : g.edges) out += csv::format_row({e.from, e.to, std::string(edge_kind_name(e.kind))});
    return out;
}

} // namespace mise::catalog
