#include "mise/marc.hpp"

#include "mise/error.hpp"
#include "mise/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace mise::marc {

std::optional<std::string> DataField::first(char code) const {
    for (const Subfield& s : subfields) {
        if (s.code == code) return s.value;
    }
    return std::nullopt;
}

std::vector<std::string> DataField::all(char code) const {
    std::vector<std::string> out;
    for (const Subfield& s : subfields) {
        if (s.code == code) out.push_back(s.value);
    }
    return out;
}

std::optional<std::string> MarcRecord::control(std::string_view tag) const {
    for (const ControlField& f : control_fields) {
        if (f.tag == tag) return f.value;
    }
    return std::nullopt;
}

std::vector<const DataField*> MarcRecord::fields(std::string_view tag) const {
    std::vector<const DataField*> out;
    for (const DataField& f : data_fields) {
        if (f.tag == tag) out.push_back(&f);
    }
    return out;
}

bool is_control_tag(std::string_view tag) { return tag.size() == 3 && tag[0] == '0' && tag[1] == '0'; }

namespace {

bool is_valid_tag(std::string_view tag) {
    return tag.size() == 3 && std::all_of(tag.begin(), tag.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::size_t read_number(std::string_view s, std::size_t pos, std::size_t len, const char* what) {
    std::size_t v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (s[i] < '0' || s[i] > '9') throw MarcError(std::string("non-numeric ") + what);
        v = v * 10 + static_cast<std::size_t>(s[i] - '0');
    }
    return v;
}

std::string pad_number(std::size_t value, int width) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%0*zu", width, value);
    return buf;
}

bool has_reserved(std::string_view s) {
    return s.find_first_of(std::string_view("\x1D\x1E\x1F", 3)) != std::string_view::npos;
}

void check_leader(std::string_view leader) {
    if (leader.size() != kLeaderLength) throw MarcError("leader must be exactly 24 bytes");
    if (leader[9] == ' ')
        throw UnsupportedEncodingError("MARC-8 encoded record (leader/09 blank) is unsupported; only UTF-8 ('a') records are accepted");
    if (leader[9] != 'a')
        throw UnsupportedEncodingError(std::string("unsupported character coding scheme '") + leader[9] + "' in leader/09");
}

} // namespace

MarcRecord parse_iso2709(std::string_view bytes) {
    if (bytes.size() < kLeaderLength) throw MarcError("truncated record: shorter than the leader");
    const std::string_view leader = bytes.substr(0, kLeaderLength);
    const std::size_t record_length = read_number(leader, 0, 5, "record length");
    check_leader(leader);
    if (leader[10] != '2' || leader[11] != '2')
        throw MarcError("unsupported indicator/subfield-code counts in leader");
    if (leader[20] != '4' || leader[21] != '5') throw MarcError("unsupported directory entry map in leader");
    if (record_length > bytes.size()) throw MarcError("truncated record: leader declares " + std::to_string(record_length) + " bytes, got " + std::to_string(bytes.size()));
    if (record_length != bytes.size()) throw MarcError("record length mismatch: leader declares " + std::to_string(record_length) + " bytes, got " + std::to_string(bytes.size()));
    if (bytes.back() != kRecordTerminator) throw MarcError("record terminator absent");
    if (!is_valid_utf8(bytes)) throw MarcError("record declares UTF-8 but contains invalid byte sequences");

    const std::size_t base = read_number(leader, 12, 5, "base address");
    if (base < kLeaderLength + 1 || base > record_length - 1) throw MarcError("base address out of range");
    if (bytes[base - 1] != kFieldTerminator) throw MarcError("directory is not terminated at the base address");
    const std::size_t dir_len = base - 1 - kLeaderLength;
    if (dir_len % kDirectoryEntryLength != 0) throw MarcError("directory length is not a multiple of 12");

    // Field data occupies [base, record_length - 1); the last byte is the terminator.
    const std::string_view data = bytes.substr(base, record_length - 1 - base);

    MarcRecord rec;
    rec.leader = std::string(leader);
    for (std::size_t off = kLeaderLength; off < base - 1; off += kDirectoryEntryLength) {
        const std::string_view entry = bytes.substr(off, kDirectoryEntryLength);
        std::string tag(entry.substr(0, 3));
        if (!is_valid_tag(tag)) throw MarcError("invalid tag '" + tag + "' in directory");
        const std::size_t len = read_number(entry, 3, 4, "field length");
        const std::size_t start = read_number(entry, 7, 5, "field start");
        if (len == 0 || start + len > data.size())
            throw MarcError("directory/field mismatch: field " + tag + " extends past the record data");
        const std::string_view field = data.substr(start, len);
        if (field.back() != kFieldTerminator)
            throw MarcError("directory/field mismatch: field " + tag + " does not end with a field terminator");
        const std::string_view body = field.substr(0, len - 1);
        if (body.find(kFieldTerminator) != std::string_view::npos || body.find(kRecordTerminator) != std::string_view::npos)
            throw MarcError("directory/field mismatch: field " + tag + " spans a terminator");

        if (is_control_tag(tag)) {
            if (body.find(kSubfieldDelimiter) != std::string_view::npos)
                throw MarcError("control field " + tag + " contains a subfield delimiter");
            rec.control_fields.push_back({std::move(tag), std::string(body)});
            continue;
        }
        if (body.size() < 2) throw MarcError("data field " + tag + " lacks indicators");
        DataField df{tag, body[0], body[1], {}};
        if (df.ind1 == kSubfieldDelimiter || df.ind2 == kSubfieldDelimiter)
            throw MarcError("data field " + tag + " lacks indicators");
        std::string_view rest = body.substr(2);
        if (!rest.empty() && rest.front() != kSubfieldDelimiter)
            throw MarcError("data field " + tag + " has data before its first subfield");
        while (!rest.empty()) {
            rest.remove_prefix(1);  // delimiter
            if (rest.empty()) throw MarcError("data field " + tag + " has an empty subfield code");
            const char code = rest.front();
            rest.remove_prefix(1);
            const std::size_t next = rest.find(kSubfieldDelimiter);
            df.subfields.push_back({code, std::string(rest.substr(0, next))});
            rest = next == std::string_view::npos ? std::string_view{} : rest.substr(next);
        }
        rec.data_fields.push_back(std::move(df));
    }
    return rec;
}

std::vector<std::string_view> split_iso2709(std::string_view bytes) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        // Tolerate line breaks some tools insert between records.
        if (bytes[pos] == '\n' || bytes[pos] == '\r') {
            ++pos;
            continue;
        }
        if (bytes.size() - pos < 5) throw MarcError("truncated record at byte " + std::to_string(pos));
        const std::size_t len = read_number(bytes, pos, 5, "record length");
        if (len < kLeaderLength + 2 || pos + len > bytes.size())
            throw MarcError("truncated record at byte " + std::to_string(pos));
        out.push_back(bytes.substr(pos, len));
        pos += len;
    }
    return out;
}

std::string serialize_iso2709(const MarcRecord& record) {
    if (record.leader.size() != kLeaderLength) throw MarcError("leader must be exactly 24 bytes");
    if (has_reserved(record.leader)) throw MarcError("leader contains a reserved delimiter byte");

    std::string directory;
    std::string data;
    auto add_field = [&](const std::string& tag, const std::string& body) {
        if (!is_valid_tag(tag)) throw MarcError("invalid tag '" + tag + "'");
        const std::size_t len = body.size() + 1;
        if (len > 9999) throw MarcError("field " + tag + " exceeds 9999 bytes");
        if (data.size() > 99999) throw MarcError("record data exceeds 99999 bytes");
        directory += tag + pad_number(len, 4) + pad_number(data.size(), 5);
        data += body;
        data += kFieldTerminator;
    };

    for (const ControlField& f : record.control_fields) {
        if (!is_control_tag(f.tag)) throw MarcError("control field with data tag '" + f.tag + "'");
        if (has_reserved(f.value)) throw MarcError("field " + f.tag + " contains a reserved delimiter byte");
        add_field(f.tag, f.value);
    }
    for (const DataField& f : record.data_fields) {
        if (is_control_tag(f.tag)) throw MarcError("data field with control tag '" + f.tag + "'");
        std::string body{f.ind1, f.ind2};
        if (has_reserved(body)) throw MarcError("field " + f.tag + " has a reserved byte as indicator");
        for (const Subfield& s : f.subfields) {
            if (has_reserved(std::string_view(&s.code, 1)) || has_reserved(s.value))
                throw MarcError("field " + f.tag + " subfield $" + std::string(1, s.code) + " contains a reserved delimiter byte");
            body += kSubfieldDelimiter;
            body += s.code;
            body += s.value;
        }
        add_field(f.tag, body);
    }

    const std::size_t base = kLeaderLength + directory.size() + 1;
    const std::size_t total = base + data.size() + 1;
    if (total > 99999) throw MarcError("record exceeds 99999 bytes");

    std::string out = record.leader;
    out.replace(0, 5, pad_number(total, 5));
    out.replace(12, 5, pad_number(base, 5));
    out += directory;
    out += kFieldTerminator;
    out += data;
    out += kRecordTerminator;
    return out;
}

std::vector<MarcRecord> read_marc_file(const std::string& path) {
    const std::string bytes = read_file(path);
    const std::string lower = to_lower(path);
    std::vector<MarcRecord> out;
    try {
        if (lower.ends_with(".xml")) return parse_marcxml(bytes);
        for (std::string_view rec : split_iso2709(bytes)) out.push_back(parse_iso2709(rec));
    } catch (const MarcError& e) {
        throw MarcError(path + ": " + e.what());
    }
    return out;
}

// -- title profiles -----------------------------------------------------------

std::string normalize_lccn(std::string_view raw) {
    std::string out;
    for (char c : raw) {
        if (!std::isspace(static_cast<unsigned char>(c))) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

namespace {

// Drops trailing ISBD punctuation (" /", " :", " ;", " =", ",", a final ".") from a title part.
std::string clean_title_part(std::string_view s) {
    std::string t = trim(s);
    while (!t.empty() && (t.back() == '/' || t.back() == ':' || t.back() == ';' || t.back() == '=' || t.back() == ',')) {
        t.pop_back();
        t = trim(t);
    }
    if (t.size() > 1 && t.back() == '.' && t[t.size() - 2] != '.') t.pop_back();
    return t;
}

LinkEntry make_link(const DataField& f) {
    LinkEntry e;
    e.raw_tag = f.tag;
    if (auto t = f.first('t')) {
        std::string title = clean_title_part(*t);
        if (!title.empty()) e.target_title = std::move(title);
    }
    // "(DLC)sn 84020000" -> "sn84020000". Other institution prefixes are also
    // stripped, but a DLC number wins when several $w are present.
    bool have_dlc = false;
    for (const std::string& w : f.all('w')) {
        const std::string raw = trim(w);
        std::string_view v = raw;
        bool dlc = false;
        if (!v.empty() && v.front() == '(') {
            const std::size_t close = v.find(')');
            if (close != std::string_view::npos) {
                dlc = to_lower(v.substr(0, close + 1)) == "(dlc)";
                v.remove_prefix(close + 1);
            }
        }
        std::string lccn = normalize_lccn(v);
        if (lccn.empty()) continue;
        if (!e.target_lccn || (dlc && !have_dlc)) {
            e.target_lccn = std::move(lccn);
            e.raw_target = raw;
            have_dlc = dlc;
        }
    }
    return e;
}

void add_language(std::vector<std::string>& langs, std::string_view code) {
    std::string c = to_lower(trim(code));
    if (c.size() != 3) return;
    if (!std::all_of(c.begin(), c.end(), [](char ch) { return ch >= 'a' && ch <= 'z'; })) return;
    if (std::find(langs.begin(), langs.end(), c) == langs.end()) langs.push_back(std::move(c));
}

} // namespace

TitleProfile extract_title_profile(const MarcRecord& record) {
    TitleProfile p;

    std::string title;
    if (auto f245 = record.fields("245"); !f245.empty()) {
        const std::string a = clean_title_part(f245.front()->first('a').value_or(""));
        const std::string b = clean_title_part(f245.front()->first('b').value_or(""));
        title = b.empty() ? a : (a.empty() ? b : a + " " + b);
    }
    p.title = title;

    for (const DataField* f : record.fields("010")) {
        if (auto a = f->first('a')) {
            p.lccn = normalize_lccn(*a);
            if (!p.lccn.empty()) break;
        }
    }
    if (p.lccn.empty()) {
        if (auto c = record.control("001")) p.lccn = normalize_lccn(*c);
    }
    if (p.lccn.empty())
        throw MarcError("record has no control number (010 $a or 001)" + (title.empty() ? std::string() : ": '" + title + "'"));

    if (auto f008 = record.control("008"); f008 && f008->size() >= 38) add_language(p.languages, f008->substr(35, 3));
    for (const DataField* f : record.fields("041")) {
        for (const Subfield& s : f->subfields) {
            if (!std::isalpha(static_cast<unsigned char>(s.code))) continue;
            // Older records pack several codes into one subfield ("engfre").
            for (std::size_t i = 0; i + 3 <= s.value.size(); i += 3) add_language(p.languages, std::string_view(s.value).substr(i, 3));
        }
    }
    for (const DataField* f : record.fields("546")) {
        if (auto a = f->first('a')) {
            p.language_note = trim(*a);
            break;
        }
    }

    auto links = [&](std::string_view tag, std::vector<LinkEntry>& out) {
        for (const DataField* f : record.fields(tag)) {
            LinkEntry e = make_link(*f);
            if (e.target_lccn || e.target_title) out.push_back(std::move(e));
        }
    };
    links("780", p.preceding);
    links("785", p.succeeding);
    links("775", p.other_language_editions);
    links("765", p.translation_of);
    return p;
}

namespace {

using json = nlohmann::json;

json link_to_json(const LinkEntry& e) {
    json j = {{"raw_tag", e.raw_tag}};
    j["target_lccn"] = e.target_lccn ? json(*e.target_lccn) : json(nullptr);
    j["target_title"] = e.target_title ? json(*e.target_title) : json(nullptr);
    j["raw_target"] = e.raw_target;
    return j;
}

LinkEntry link_from_json(const json& j) {
    LinkEntry e;
    e.raw_tag = j.at("raw_tag").get<std::string>();
    if (!j.at("target_lccn").is_null()) e.target_lccn = j.at("target_lccn").get<std::string>();
    if (!j.at("target_title").is_null()) e.target_title = j.at("target_title").get<std::string>();
    e.raw_target = j.value("raw_target", "");
    return e;
}

json links_to_json(const std::vector<LinkEntry>& v) {
    json a = json::array();
    for (const LinkEntry& e : v) a.push_back(link_to_json(e));
    return a;
}

std::vector<LinkEntry> links_from_json(const json& a) {
    std::vector<LinkEntry> v;
    for (const json& j : a) v.push_back(link_from_json(j));
    return v;
}

} // namespace

std::string profile_to_json_line(const TitleProfile& p) {
    // ordered_json keeps the field order stable and readable.
    nlohmann::ordered_json j;
    j["lccn"] = p.lccn;
    j["title"] = p.title;
    j["languages"] = p.languages;
    j["language_note"] = p.language_note ? json(*p.language_note) : json(nullptr);
    j["preceding"] = links_to_json(p.preceding);
    j["succeeding"] = links_to_json(p.succeeding);
    j["other_language_editions"] = links_to_json(p.other_language_editions);
    j["translation_of"] = links_to_json(p.translation_of);
    return j.dump();
}

TitleProfile profile_from_json_line(std::string_view line) {
    try {
        const json j = json::parse(line);
        TitleProfile p;
        p.lccn = j.at("lccn").get<std::string>();
        p.title = j.at("title").get<std::string>();
        p.languages = j.at("languages").get<std::vector<std::string>>();
        if (!j.at("language_note").is_null()) p.language_note = j.at("language_note").get<std::string>();
        p.preceding = links_from_json(j.at("preceding"));
        p.succeeding = links_from_json(j.at("succeeding"));
        p.other_language_editions = links_from_json(j.at("other_language_editions"));
        p.translation_of = links_from_json(j.at("translation_of"));
        return p;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed title profile: ") + e.what());
    }
}

} // namespace mise::marc
