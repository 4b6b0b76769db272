#include "mise/error.hpp"
#include "mise/marc.hpp"
#include "mise/text.hpp"

#include <expat.h>

#include <algorithm>
#include <cstring>
#include <memory>
#include <optional>

namespace mise::marc {
namespace {

std::string_view local_name(const XML_Char* name) {
    std::string_view n(name);
    const std::size_t colon = n.rfind(':');
    return colon == std::string_view::npos ? n : n.substr(colon + 1);
}

std::optional<std::string> attribute(const XML_Char** attrs, std::string_view wanted) {
    for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
        if (local_name(attrs[i]) == wanted) return std::string(attrs[i + 1]);
    }
    return std::nullopt;
}

bool digits3(std::string_view tag) {
    return tag.size() == 3 && std::all_of(tag.begin(), tag.end(), [](char c) { return c >= '0' && c <= '9'; });
}

enum class Capture { none, leader, control, subfield };

struct ParseState {
    XML_Parser parser = nullptr;
    std::vector<MarcRecord> records;
    std::optional<MarcRecord> current;
    bool have_leader = false;
    std::optional<DataField> field;
    Capture capture = Capture::none;
    std::string text;
    std::string pending_tag;
    char pending_code = 0;
    std::string error;

    void fail(std::string message) {
        if (!error.empty()) return;
        error = "line " + std::to_string(XML_GetCurrentLineNumber(parser)) + ": " + std::move(message);
        XML_StopParser(parser, XML_FALSE);
    }

    void start(std::string_view name, const XML_Char** attrs) {
        if (!error.empty()) return;
        if (name == "record") {
            if (current) return fail("nested record element");
            current.emplace();
            have_leader = false;
            return;
        }
        if (!current) return;  // collection wrapper or foreign elements
        if (name == "leader") {
            capture = Capture::leader;
            text.clear();
        } else if (name == "controlfield") {
            auto tag = attribute(attrs, "tag");
            if (!tag) return fail("controlfield missing 'tag' attribute");
            if (!digits3(*tag) || !is_control_tag(*tag)) return fail("invalid controlfield tag '" + *tag + "'");
            pending_tag = *tag;
            capture = Capture::control;
            text.clear();
        } else if (name == "datafield") {
            if (field) return fail("nested datafield element");
            auto tag = attribute(attrs, "tag");
            if (!tag) return fail("datafield missing 'tag' attribute");
            if (!digits3(*tag) || is_control_tag(*tag)) return fail("invalid datafield tag '" + *tag + "'");
            auto ind1 = attribute(attrs, "ind1");
            auto ind2 = attribute(attrs, "ind2");
            if (!ind1 || !ind2) return fail("datafield " + *tag + " missing indicator attribute");
            if (ind1->size() != 1 || ind2->size() != 1) return fail("datafield " + *tag + " indicators must be single characters");
            field = DataField{*tag, (*ind1)[0], (*ind2)[0], {}};
        } else if (name == "subfield") {
            if (!field) return fail("subfield outside a datafield");
            auto code = attribute(attrs, "code");
            if (!code) return fail("subfield missing 'code' attribute");
            if (code->size() != 1) return fail("subfield code '" + *code + "' must be a single character");
            pending_code = (*code)[0];
            capture = Capture::subfield;
            text.clear();
        }
    }

    void end(std::string_view name) {
        if (!error.empty() || !current) return;
        if (name == "leader" && capture == Capture::leader) {
            if (text.size() != kLeaderLength) return fail("leader must be exactly 24 characters, got " + std::to_string(text.size()));
            current->leader = text;
            have_leader = true;
            capture = Capture::none;
        } else if (name == "controlfield" && capture == Capture::control) {
            current->control_fields.push_back({pending_tag, text});
            capture = Capture::none;
        } else if (name == "subfield" && capture == Capture::subfield) {
            field->subfields.push_back({pending_code, text});
            capture = Capture::none;
        } else if (name == "datafield" && field) {
            current->data_fields.push_back(std::move(*field));
            field.reset();
        } else if (name == "record") {
            if (!have_leader) return fail("record missing leader");
            records.push_back(std::move(*current));
            current.reset();
        }
    }
};

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
    static_cast<ParseState*>(user)->start(local_name(name), attrs);
}

void XMLCALL on_end(void* user, const XML_Char* name) { static_cast<ParseState*>(user)->end(local_name(name)); }

void XMLCALL on_text(void* user, const XML_Char* s, int len) {
    auto* st = static_cast<ParseState*>(user);
    if (st->capture != Capture::none) st->text.append(s, static_cast<std::size_t>(len));
}

} // namespace

std::vector<MarcRecord> parse_marcxml(std::string_view document) {
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"), &XML_ParserFree);
    if (!parser) throw MarcError("cannot create XML parser");
    ParseState state;
    state.parser = parser.get();
    XML_SetUserData(parser.get(), &state);
    XML_SetElementHandler(parser.get(), on_start, on_end);
    XML_SetCharacterDataHandler(parser.get(), on_text);

    const XML_Status status = XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE);
    if (!state.error.empty()) throw MarcError("MARCXML schema error: " + state.error);
    if (status != XML_STATUS_OK) {
        throw MarcError("malformed XML at line " + std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
                        XML_ErrorString(XML_GetErrorCode(parser.get())));
    }
    return std::move(state.records);
}

std::string write_marcxml(std::span<const MarcRecord> records) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                      "<collection xmlns=\"http://www.loc.gov/MARC21/slim\">\n";
    for (const MarcRecord& r : records) {
        out += "  <record>\n";
        out += "    <leader>" + xml_escape(r.leader) + "</leader>\n";
        for (const ControlField& f : r.control_fields) {
            out += "    <controlfield tag=\"" + xml_escape(f.tag) + "\">" + xml_escape(f.value) + "</controlfield>\n";
        }
        for (const DataField& f : r.data_fields) {
            out += "    <datafield tag=\"" + xml_escape(f.tag) + "\" ind1=\"" + xml_escape(std::string(1, f.ind1)) +
                   "\" ind2=\"" + xml_escape(std::string(1, f.ind2)) + "\">\n";
            for (const Subfield& s : f.subfields) {
                out += "      <subfield code=\"" + xml_escape(std::string(1, s.code)) + "\">" + xml_escape(s.value) + "</subfield>\n";
            }
            out += "    </datafield>\n";
        }
        out += "  </record>\n";
    }
    out += "</collection>\n";
    return out;
}

} // namespace mise::marc
