#include "fixtures.hpp"

#include "mise/random.hpp"
#include "mise/text.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <unistd.h>

namespace mise::testing {

namespace fs = std::filesystem;

namespace {

constexpr char FT = '\x1e', RT = '\x1d', SD = '\x1f';

std::string field_bytes(const RawField& f) {
    if (f.indicators.empty()) return f.value + FT;
    std::string out = f.indicators;
    for (const auto& [code, value] : f.subfields) {
        out += SD;
        out += code;
        out += value;
    }
    return out + FT;
}

std::string padded(std::size_t v, int width) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%0*zu", width, v);
    return buf;
}

std::string esc(const std::string& s) { return xml_escape(s); }

} // namespace

std::string assemble_iso2709(const RawRecord& r) {
    std::string directory, data;
    for (const RawField& f : r.fields) {
        const std::string body = field_bytes(f);
        directory += f.tag + padded(body.size(), 4) + padded(data.size(), 5);
        data += body;
    }
    directory += FT;
    const std::size_t base = 24 + directory.size();
    const std::size_t total = base + data.size() + 1;
    return padded(total, 5) + r.leader_tail + padded(base, 5) + r.leader_end + directory + data + RT;
}

std::string assemble_marcxml(const std::vector<RawRecord>& records) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<marc:collection xmlns:marc=\"http://www.loc.gov/MARC21/slim\">\n";
    for (const RawRecord& r : records) {
        const std::string bytes = assemble_iso2709(r);
        out += "<marc:record>\n  <marc:leader>" + bytes.substr(0, 24) + "</marc:leader>\n";
        for (const RawField& f : r.fields) {
            if (f.indicators.empty()) {
                out += "  <marc:controlfield tag=\"" + f.tag + "\">" + esc(f.value) + "</marc:controlfield>\n";
                continue;
            }
            out += "  <marc:datafield tag=\"" + f.tag + "\" ind1=\"" + f.indicators.substr(0, 1) + "\" ind2=\"" +
                   f.indicators.substr(1, 1) + "\">";
            for (const auto& [code, value] : f.subfields) {
                out += "<marc:subfield code=\"" + std::string(1, code) + "\">" + esc(value) + "</marc:subfield>";
            }
            out += "</marc:datafield>\n";
        }
        out += "</marc:record>\n";
    }
    return out + "</marc:collection>\n";
}

std::string test_title_fixture() {
    // leader, one directory entry (245, length 15, offset 0), field, record end
    return std::string("00053nas a2200037 a 4500") + "245001500000" + FT + "00" + SD + "aTest Title" + FT + RT;
}

std::vector<RawRecord> marc_fixture_set() {
    auto cf = [](std::string tag, std::string v) { return RawField{std::move(tag), "", {}, std::move(v)}; };
    auto df = [](std::string tag, std::string ind, std::vector<std::pair<char, std::string>> subs) {
        return RawField{std::move(tag), std::move(ind), std::move(subs), ""};
    };
    const std::string f008 = "850101d18901910xx wkr ne      0    eng d";

    std::vector<RawRecord> v;
    v.push_back({});  // no fields at all
    v.push_back({"nas a22", " a 4500", {df("245", "00", {{'a', "Test Title"}})}});
    v.push_back({"nas a22", " a 4500", {cf("001", "sn84000001"), cf("008", f008), df("010", "  ", {{'a', "  sn 84000001 "}}),
                                        df("245", "00", {{'a', "The Bee."}})}});
    // empty control field and a data field with no subfields
    v.push_back({"nas a22", " a 4500", {cf("001", "sn84000002"), cf("005", ""), df("500", "  ", {}),
                                        df("245", "10", {{'a', "Empty fields"}})}});
    // repeated 780
    v.push_back({"nas a22", " a 4500", {cf("001", "sn84000003"),
                                        df("245", "00", {{'a', "The Appeal."}}),
                                        df("780", "00", {{'t', "Western Appeal"}, {'w', "(DLC)sn84000004"}}),
                                        df("780", "00", {{'t', "Northwestern Bulletin"}, {'w', "(OCoLC)1234"}, {'w', "(DLC)sn84000005"}}),
                                        df("780", "00", {{'t', "Title only"}})}});
    // multi-subfield title and language fields
    v.push_back({"nas a22", " a 4500", {cf("001", "sn84000006"), cf("008", f008),
                                        df("041", "0 ", {{'a', "engfre"}, {'a', "ger"}, {'h', "fre"}}),
                                        df("245", "04", {{'a', "The Colored American :"}, {'b', "a national negro newspaper /"}, {'c', "ed. by E.E. Cooper."}}),
                                        df("546", "  ", {{'a', "In French and English."}})}});
    // non-ASCII text, two-byte and three-byte sequences
    v.push_back({"nas a22", " a 4500", {cf("001", "sn84000007"), df("245", "00", {{'a', "L'Abeille de la Nouvelle-Orléans"}}),
                                        df("246", "1 ", {{'a', "Ἡ Ἀτλαντίς — 大西洋"}})}});
    // every link tag
    v.push_back({"nas a22", " a 4500", {cf("001", "sn84000008"), df("245", "00", {{'a', "Links"}}),
                                        df("765", "0 ", {{'t', "Original"}, {'w', "(DLC)sn84000009"}}),
                                        df("775", "1 ", {{'t', "Edition"}, {'w', "(DLC)sn84000010"}}),
                                        df("785", "00", {{'t', "New Era"}, {'w', "(DLC)sn84020000"}})}});
    // empty subfield value
    v.push_back({"nas a22", " a 4500", {cf("001", "sn84000011"), df("245", "00", {{'a', ""}, {'b', "subtitle only"}})}});
    // many repeated fields
    {
        RawRecord r{"nas a22", " a 4500", {cf("001", "sn84000012"), df("245", "00", {{'a', "Many notes"}})}};
        for (int i = 0; i < 30; ++i) r.fields.push_back(df("500", "  ", {{'a', "Note " + std::to_string(i)}}));
        v.push_back(r);
    }
    // XML-special characters survive both encodings
    v.push_back({"nas a22", " a 4500", {cf("001", "sn84000013"), df("245", "00", {{'a', "Smith & Sons <weekly> \"news\""}})}});
    // different leader status/type bytes
    v.push_back({"cas a22", " i 4500", {cf("001", "sn84000014"), cf("003", "DLC"), df("245", "00", {{'a', "Corrected"}})}});
    return v;
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("mise_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

ArchetypeCorpus write_archetype_corpus(const fs::path& dir, std::size_t titles_per_archetype, int years,
                                       int pages_per_year, std::uint64_t seed) {
    struct Shape {
        ContentClass cls;
        double x1, y1, x2, y2;
    };
    const std::vector<std::vector<Shape>> archetypes = {
        {{ContentClass::advertisement, 0.04, 0.58, 0.48, 0.96}, {ContentClass::advertisement, 0.52, 0.58, 0.96, 0.96},
         {ContentClass::headline, 0.05, 0.02, 0.95, 0.06}},
        {{ContentClass::headline, 0.03, 0.02, 0.97, 0.16}, {ContentClass::headline, 0.03, 0.18, 0.62, 0.25},
         {ContentClass::headline, 0.38, 0.27, 0.97, 0.32}},
        {{ContentClass::illustration, 0.28, 0.28, 0.72, 0.70}, {ContentClass::photograph, 0.36, 0.34, 0.64, 0.60},
         {ContentClass::headline, 0.05, 0.02, 0.95, 0.06}},
    };
    const char* groups[] = {"German", "Italian", "Polish", "Yiddish"};

    Random rng(seed);
    ArchetypeCorpus out;
    std::vector<RawRecord> records;
    std::string editors = "lccn,editor_name,group,language\n";
    std::string predictions;
    std::size_t title_no = 0;
    for (std::size_t a = 0; a < archetypes.size(); ++a) {
        for (std::size_t t = 0; t < titles_per_archetype; ++t, ++title_no) {
            const std::string lccn = "sn9" + padded(title_no, 7);
            records.push_back({"nas a22", " a 4500",
                               {{"001", "", {}, lccn}, {"245", "00", {{'a', "Synthetic title " + std::to_string(title_no)}}, ""}}});
            editors += lccn + ",Editor " + std::to_string(title_no) + "," + groups[title_no % 4] + ",\n";
            for (int y = 0; y < years; ++y) {
                const int year = 1890 + y;
                out.truth.push_back({TitleYear{lccn, year}, static_cast<int>(a)});
                for (int p = 0; p < pages_per_year; ++p) {
                    PageRecord page;
                    page.lccn = lccn;
                    page.issue_date = {year, static_cast<unsigned>(1 + p % 12), static_cast<unsigned>(1 + p)};
                    page.page_seq = 1;
                    for (const Shape& s : archetypes[a]) {
                        auto jitter = [&](double v) { return std::clamp(v + 0.08 * (rng.uniform() - 0.5), 0.0, 1.0); };
                        BoundingBox b{jitter(s.x1), jitter(s.y1), jitter(s.x2), jitter(s.y2), s.cls, 0.55 + 0.45 * rng.uniform()};
                        if (b.x2 > b.x1 && b.y2 > b.y1) page.boxes.push_back(b);
                    }
                    if (rng.uniform() < 0.3) {  // a stray small box of any class
                        const double x = 0.8 * rng.uniform(), yy = 0.8 * rng.uniform();
                        page.boxes.push_back({x, yy, x + 0.15, yy + 0.15, kAllClasses[rng.below(kClassCount)], 0.6});
                    }
                    predictions += format_prediction_line(page) + "\n";
                }
            }
        }
    }
    std::string mrc;
    for (const RawRecord& r : records) mrc += assemble_iso2709(r);
    write_file(dir / "titles.mrc", mrc);
    write_file(dir / "editors.csv", editors);
    write_file(dir / "predictions.jsonl", predictions);

    RunConfig& c = out.config;
    c.marc = {(dir / "titles.mrc").string()};
    c.editors = (dir / "editors.csv").string();
    c.predictions = (dir / "predictions.jsonl").string();
    c.out = (dir / "out").string();
    c.year_start = 1890;
    c.year_end = 1890 + years - 1;
    c.min_pages = static_cast<std::size_t>(pages_per_year);
    c.perplexity = 10;
    c.k = 3;
    c.render_heatmaps = false;
    c.seed = seed;
    return out;
}

std::vector<std::pair<std::string, std::string>> snapshot_tree(const fs::path& root) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) out.emplace_back(fs::relative(e.path(), root).generic_string(), read_file(e.path()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace mise::testing
