#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mise::marc {

inline constexpr char kSubfieldDelimiter = '\x1F';
inline constexpr char kFieldTerminator = '\x1E';
inline constexpr char kRecordTerminator = '\x1D';
inline constexpr std::size_t kLeaderLength = 24;
inline constexpr std::size_t kDirectoryEntryLength = 12;

struct ControlField {
    std::string tag;
    std::string value;

    bool operator==(const ControlField&) const = default;
};

struct Subfield {
    char code = 'a';
    std::string value;

    bool operator==(const Subfield&) const = default;
};

struct DataField {
    std::string tag;
    char ind1 = ' ';
    char ind2 = ' ';
    std::vector<Subfield> subfields;

    /// First value of subfield `code`, if any.
    std::optional<std::string> first(char code) const;
    std::vector<std::string> all(char code) const;

    bool operator==(const DataField&) const = default;
};

/// A MARC 21 bibliographic record. Control fields (00X) and data fields are
/// held in separate lists, each in original order.
struct MarcRecord {
    std::string leader;
    std::vector<ControlField> control_fields;
    std::vector<DataField> data_fields;

    std::optional<std::string> control(std::string_view tag) const;
    std::vector<const DataField*> fields(std::string_view tag) const;

    bool operator==(const MarcRecord&) const = default;
};

bool is_control_tag(std::string_view tag);

/// Parses exactly one ISO 2709 record. The leader must declare UTF-8
/// (position 9 = 'a'); MARC-8 records raise UnsupportedEncodingError.
/// Directory offsets and lengths are checked against actual field boundaries.
MarcRecord parse_iso2709(std::string_view bytes);

/// Splits a file of concatenated records using each leader's record length.
std::vector<std::string_view> split_iso2709(std::string_view bytes);

/// Inverse of parse_iso2709. The leader's length and base address are
/// recomputed; the directory is laid out in field order with contiguous offsets.
/// Throws MarcError if any value contains a reserved delimiter byte.
std::string serialize_iso2709(const MarcRecord& record);

/// Parses a MARCXML document (a collection or a single record). Namespace
/// prefixes on element names are ignored.
std::vector<MarcRecord> parse_marcxml(std::string_view document);

std::string write_marcxml(std::span<const MarcRecord> records);

/// Reads a `.mrc` (ISO 2709) or `.xml` (MARCXML) file by extension.
std::vector<MarcRecord> read_marc_file(const std::string& path);

// -- title profiles -----------------------------------------------------------

/// Lowercase, all whitespace removed. Idempotent.
std::string normalize_lccn(std::string_view raw);

struct LinkEntry {
    std::optional<std::string> target_lccn;
    std::optional<std::string> target_title;
    std::string raw_target;  // $w as catalogued, before normalisation
    std::string raw_tag;     // 765, 775, 780 or 785

    bool operator==(const LinkEntry&) const = default;
};

struct TitleProfile {
    std::string lccn;
    std::string title;
    std::vector<std::string> languages;
    std::optional<std::string> language_note;
    std::vector<LinkEntry> preceding;               // 780
    std::vector<LinkEntry> succeeding;              // 785
    std::vector<LinkEntry> other_language_editions; // 775
    std::vector<LinkEntry> translation_of;          // 765

    bool operator==(const TitleProfile&) const = default;
};

/// Distils the serials-linkage facts of a record. Requires 010 $a or 001.
TitleProfile extract_title_profile(const MarcRecord& record);

std::string profile_to_json_line(const TitleProfile& profile);
TitleProfile profile_from_json_line(std::string_view line);

} // namespace mise::marc
