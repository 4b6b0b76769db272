#pragma once

#include "mise/ingest.hpp"
#include "mise/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace mise::testing {

// Hand assembly of MARC records, independent of the library serializer:
// offsets and lengths are computed here from the raw field bytes.
struct RawField {
    std::string tag;
    std::string indicators;                              // empty for control fields
    std::vector<std::pair<char, std::string>> subfields;  // data fields
    std::string value;                                   // control fields
};

struct RawRecord {
    std::string leader_tail = "nas a22";  // leader bytes 5..11
    std::string leader_end = " a 4500";   // leader bytes 17..23
    std::vector<RawField> fields;
};

std::string assemble_iso2709(const RawRecord& r);
std::string assemble_marcxml(const std::vector<RawRecord>& records);

/// The single-245 record: exactly 53 bytes.
std::string test_title_fixture();

/// Twelve records covering empty records, empty fields, repeated 780s,
/// multi-subfield fields, and non-ASCII text.
std::vector<RawRecord> marc_fixture_set();

/// Scratch directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

private:
    std::filesystem::path path_;
};

/// Writes MARC, editor, and prediction inputs for `titles_per_archetype` x
/// `years` title-years per archetype: 0 = ads along the bottom, 1 = banner
/// headlines across the top, 2 = centred portrait illustration. Returns a
/// config pointing at them with output in `dir/out`.
struct ArchetypeCorpus {
    RunConfig config;
    std::vector<std::pair<TitleYear, int>> truth;  // title-year -> archetype
};
ArchetypeCorpus write_archetype_corpus(const std::filesystem::path& dir, std::size_t titles_per_archetype,
                                       int years, int pages_per_year, std::uint64_t seed);

/// Reads every regular file below `root` into (relative path, bytes).
std::vector<std::pair<std::string, std::string>> snapshot_tree(const std::filesystem::path& root);

} // namespace mise::testing
