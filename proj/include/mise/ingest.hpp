#pragma once

#include "mise/classes.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mise {

/// Calendar date parsed from ISO YYYY-MM-DD.
struct Date {
    int year = 1;
    unsigned month = 1;
    unsigned day = 1;

    auto operator<=>(const Date&) const = default;
};

/// Throws InputError unless `text` is a valid Gregorian YYYY-MM-DD date.
Date parse_iso_date(std::string_view text);
std::string format_iso_date(const Date& d);

/// A predicted visual-content region. Coordinates are page fractions with the
/// origin at the top-left corner.
struct BoundingBox {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
    ContentClass cls = ContentClass::advertisement;
    double score = 0;

    double area() const { return (x2 - x1) * (y2 - y1); }
    bool operator==(const BoundingBox&) const = default;
};

struct PageRecord {
    std::string lccn;
    Date issue_date;
    int page_seq = 1;
    std::vector<BoundingBox> boxes;

    bool operator==(const PageRecord&) const = default;
};

struct YearRange {
    int start = 1890;
    int end = 1909;

    bool contains(int year) const { return year >= start && year <= end; }
    bool operator==(const YearRange&) const = default;
};

struct FilterCriteria {
    bool front_page_only = true;
    double min_score = 0.5;
    YearRange year_range;
    std::optional<std::set<std::string>> lccn_allowlist;

    /// Throws ConfigError on an out-of-range threshold or inverted year range.
    void validate() const;
};

/// Per-run tally of boxes dropped or clamped during parsing.
struct IngestWarnings {
    std::size_t dropped_boxes = 0;
    std::size_t clamped_boxes = 0;

    IngestWarnings& operator+=(const IngestWarnings& o) {
        dropped_boxes += o.dropped_boxes;
        clamped_boxes += o.clamped_boxes;
        return *this;
    }
};

/// Coordinates this far outside [0,1] are clamped; anything further is dropped.
inline constexpr double kClampTolerance = 0.01;

/// Parses one line of the line-delimited prediction format. Boxes failing
/// validation are dropped and counted in `warnings`. Throws RecordError
/// (carrying `line_number`) on structural problems or unknown class labels.
PageRecord parse_prediction_line(std::string_view line, std::size_t line_number,
                                 IngestWarnings& warnings);

/// Serialises a page back into the ingestion format.
std::string format_prediction_line(const PageRecord& page);

/// Applies `criteria` to a single page. Returns nullopt if the page is excluded;
/// otherwise the page with sub-threshold boxes removed.
std::optional<PageRecord> filter_page(const PageRecord& page, const FilterCriteria& criteria);

std::vector<PageRecord> filter_pages(const std::vector<PageRecord>& pages,
                                     const FilterCriteria& criteria);

/// Stable (lccn, issue_date, page_seq) ordering used before aggregation.
bool page_key_less(const PageRecord& a, const PageRecord& b);

} // namespace mise
