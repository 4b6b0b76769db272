#include "mise/ingest.hpp"

#include "mise/error.hpp"
#include "mise/marc.hpp"
#include "mise/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <tuple>

namespace mise {

using json = nlohmann::json;

Date parse_iso_date(std::string_view text) {
    auto digits = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (text[i] < '0' || text[i] > '9') throw InputError("invalid date '" + std::string(text) + "'");
            v = v * 10 + (text[i] - '0');
        }
        return v;
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw InputError("invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
    Date d{digits(0, 4), static_cast<unsigned>(digits(5, 2)), static_cast<unsigned>(digits(8, 2))};
    const std::chrono::year_month_day ymd{std::chrono::year{d.year}, std::chrono::month{d.month},
                                          std::chrono::day{d.day}};
    if (!ymd.ok()) throw InputError("invalid calendar date '" + std::string(text) + "'");
    return d;
}

std::string format_iso_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", d.year, d.month, d.day);
    return buf;
}

void FilterCriteria::validate() const {
    if (!(min_score >= 0.0 && min_score <= 1.0))
        throw ConfigError("min_score must lie in [0, 1]");
    if (year_range.start > year_range.end)
        throw ConfigError("year range start " + std::to_string(year_range.start) + " is after end " +
                          std::to_string(year_range.end));
}

namespace {

enum class BoxVerdict { keep, clamped, drop };

// Clamps coordinates that overshoot [0,1] by at most kClampTolerance.
BoxVerdict validate_box(BoundingBox& b) {
    double* coords[] = {&b.x1, &b.y1, &b.x2, &b.y2};
    bool clamped = false;
    for (double* c : coords) {
        if (!std::isfinite(*c)) return BoxVerdict::drop;
        if (*c < 0.0 || *c > 1.0) {
            if (*c < -kClampTolerance || *c > 1.0 + kClampTolerance) return BoxVerdict::drop;
            *c = std::clamp(*c, 0.0, 1.0);
            clamped = true;
        }
    }
    if (!(b.x1 < b.x2 && b.y1 < b.y2)) return BoxVerdict::drop;
    if (!(b.score >= 0.0 && b.score <= 1.0)) return BoxVerdict::drop;
    return clamped ? BoxVerdict::clamped : BoxVerdict::keep;
}

const json& require(const json& obj, const char* key, std::size_t line) {
    auto it = obj.find(key);
    if (it == obj.end()) throw RecordError(line, std::string("missing field '") + key + "'");
    return *it;
}

} // namespace

PageRecord parse_prediction_line(std::string_view line, std::size_t line_number,
                                 IngestWarnings& warnings) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw RecordError(line_number, std::string("malformed record: ") + e.what());
    }
    if (!obj.is_object()) throw RecordError(line_number, "record is not an object");

    PageRecord page;
    const json& lccn = require(obj, "lccn", line_number);
    if (!lccn.is_string()) throw RecordError(line_number, "'lccn' must be text");
    page.lccn = marc::normalize_lccn(lccn.get<std::string>());
    if (page.lccn.empty()) throw RecordError(line_number, "'lccn' is empty");

    const json& date = require(obj, "issue_date", line_number);
    if (!date.is_string()) throw RecordError(line_number, "'issue_date' must be text");
    try {
        page.issue_date = parse_iso_date(date.get<std::string>());
    } catch (const InputError& e) {
        throw RecordError(line_number, e.what());
    }

    const json& seq = require(obj, "page_seq", line_number);
    if (!seq.is_number_integer() || seq.get<long long>() < 1)
        throw RecordError(line_number, "'page_seq' must be a positive integer");
    page.page_seq = static_cast<int>(seq.get<long long>());

    const json& boxes = require(obj, "boxes", line_number);
    if (!boxes.is_array()) throw RecordError(line_number, "'boxes' must be an array");
    for (const json& jb : boxes) {
        if (!jb.is_object()) throw RecordError(line_number, "box entry is not an object");
        const json& cls = require(jb, "class", line_number);
        if (!cls.is_string()) throw RecordError(line_number, "box 'class' must be text");
        const auto label = cls.get<std::string>();
        const auto parsed = parse_class(label);
        if (!parsed) throw RecordError(line_number, "unknown class label '" + label + "'");

        const json& score = require(jb, "score", line_number);
        const json& coords = require(jb, "box", line_number);
        if (!score.is_number()) throw RecordError(line_number, "box 'score' must be a number");
        if (!coords.is_array() || coords.size() != 4)
            throw RecordError(line_number, "box 'box' must be an array [x1,y1,x2,y2]");
        for (const json& c : coords) {
            if (!c.is_number()) throw RecordError(line_number, "box coordinates must be numbers");
        }

        BoundingBox b{coords[0].get<double>(), coords[1].get<double>(), coords[2].get<double>(),
                      coords[3].get<double>(), *parsed, score.get<double>()};
        switch (validate_box(b)) {
        case BoxVerdict::drop: ++warnings.dropped_boxes; break;
        case BoxVerdict::clamped:
            ++warnings.clamped_boxes;
            page.boxes.push_back(b);
            break;
        case BoxVerdict::keep: page.boxes.push_back(b); break;
        }
    }
    return page;
}

std::string format_prediction_line(const PageRecord& page) {
    json boxes = json::array();
    for (const BoundingBox& b : page.boxes) {
        boxes.push_back({{"class", std::string(class_name(b.cls))},
                         {"score", b.score},
                         {"box", {b.x1, b.y1, b.x2, b.y2}}});
    }
    json obj = {{"lccn", page.lccn},
                {"issue_date", format_iso_date(page.issue_date)},
                {"page_seq", page.page_seq},
                {"boxes", std::move(boxes)}};
    return obj.dump();
}

std::optional<PageRecord> filter_page(const PageRecord& page, const FilterCriteria& criteria) {
    if (criteria.front_page_only && page.page_seq != 1) return std::nullopt;
    if (!criteria.year_range.contains(page.issue_date.year)) return std::nullopt;
    if (criteria.lccn_allowlist && !criteria.lccn_allowlist->contains(page.lccn)) return std::nullopt;
    PageRecord kept = page;
    std::erase_if(kept.boxes, [&](const BoundingBox& b) { return b.score < criteria.min_score; });
    return kept;
}

std::vector<PageRecord> filter_pages(const std::vector<PageRecord>& pages,
                                     const FilterCriteria& criteria) {
    std::vector<PageRecord> out;
    for (const PageRecord& p : pages) {
        if (auto kept = filter_page(p, criteria)) out.push_back(std::move(*kept));
    }
    return out;
}

bool page_key_less(const PageRecord& a, const PageRecord& b) {
    return std::tie(a.lccn, a.issue_date, a.page_seq) < std::tie(b.lccn, b.issue_date, b.page_seq);
}

} // namespace mise
