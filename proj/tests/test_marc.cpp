#include "fixtures.hpp"

#include "mise/error.hpp"
#include "mise/marc.hpp"
#include "mise/text.hpp"

#include <doctest.h>

using namespace mise;
using namespace mise::marc;
using mise::testing::assemble_iso2709;
using mise::testing::assemble_marcxml;

TEST_CASE("hand-built 245 record") {
    const std::string bytes = testing::test_title_fixture();
    REQUIRE(bytes.size() == 53);
    const MarcRecord r = parse_iso2709(bytes);
    CHECK(r.leader == "00053nas a2200037 a 4500");
    CHECK(r.control_fields.empty());
    REQUIRE(r.data_fields.size() == 1);
    CHECK(r.data_fields[0].tag == "245");
    CHECK(r.data_fields[0].ind1 == '0');
    CHECK(r.data_fields[0].ind2 == '0');
    REQUIRE(r.data_fields[0].subfields.size() == 1);
    CHECK(r.data_fields[0].subfields[0] == Subfield{'a', "Test Title"});
    CHECK(serialize_iso2709(r) == bytes);
}

TEST_CASE("empty record") {
    const std::string bytes = std::string("00026nas a2200025 a 4500") + '\x1e' + '\x1d';
    const MarcRecord r = parse_iso2709(bytes);
    CHECK(r.control_fields.empty());
    CHECK(r.data_fields.empty());
    CHECK(serialize_iso2709(r) == bytes);
}

TEST_CASE("fixture set round-trips byte for byte") {
    for (const auto& raw : testing::marc_fixture_set()) {
        const std::string bytes = assemble_iso2709(raw);
        CAPTURE(bytes);
        CHECK(serialize_iso2709(parse_iso2709(bytes)) == bytes);
    }
}

TEST_CASE("MARCXML parses to the same records") {
    const auto set = testing::marc_fixture_set();
    const auto from_xml = parse_marcxml(assemble_marcxml(set));
    REQUIRE(from_xml.size() == set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        CAPTURE(i);
        CHECK(from_xml[i] == parse_iso2709(assemble_iso2709(set[i])));
    }
}

TEST_CASE("MARCXML single record and the library writer") {
    const std::string xml = R"(<record xmlns="http://www.loc.gov/MARC21/slim"><leader>00053nas a2200037 a 4500</leader>)"
                            R"(<datafield tag="245" ind1="0" ind2="0"><subfield code="a">Test Title</subfield></datafield></record>)";
    const auto recs = parse_marcxml(xml);
    REQUIRE(recs.size() == 1);
    CHECK(recs[0] == parse_iso2709(testing::test_title_fixture()));

    std::vector<MarcRecord> all;
    for (const auto& raw : testing::marc_fixture_set()) all.push_back(parse_iso2709(assemble_iso2709(raw)));
    CHECK(parse_marcxml(write_marcxml(all)) == all);
}

TEST_CASE("MARCXML errors") {
    CHECK_THROWS_AS(parse_marcxml("<collection><record>"), MarcError);
    CHECK_THROWS_AS(parse_marcxml("<record><leader>short</leader></record>"), MarcError);
    CHECK_THROWS_AS(parse_marcxml("<record><leader>00053nas a2200037 a 4500</leader><datafield ind1=\"0\" ind2=\"0\"/></record>"),
                    MarcError);
    CHECK_THROWS_AS(parse_marcxml("<record><leader>00053nas a2200037 a 4500</leader>"
                                  "<datafield tag=\"245\" ind1=\"00\" ind2=\"0\"/></record>"),
                    MarcError);
}

TEST_CASE("concatenated files split on the record length") {
    std::string stream;
    const auto set = testing::marc_fixture_set();
    for (const auto& raw : set) stream += assemble_iso2709(raw) + "\n";
    CHECK(split_iso2709(stream).size() == set.size());
}

TEST_CASE("MARC-8 and malformed ISO 2709 are rejected") {
    std::string marc8 = testing::test_title_fixture();
    marc8[9] = ' ';
    CHECK_THROWS_AS(parse_iso2709(marc8), UnsupportedEncodingError);

    std::string bad_length = testing::test_title_fixture();
    bad_length[4] = '9';
    CHECK_THROWS_AS(parse_iso2709(bad_length), MarcError);

    std::string bad_base = testing::test_title_fixture();
    bad_base[16] = '9';
    CHECK_THROWS_AS(parse_iso2709(bad_base), MarcError);

    std::string no_terminator = testing::test_title_fixture();
    no_terminator.back() = 'x';
    CHECK_THROWS_AS(parse_iso2709(no_terminator), MarcError);

    CHECK_THROWS_AS(parse_iso2709("0001"), MarcError);

    std::string bad_utf8 = testing::test_title_fixture();
    bad_utf8[45] = '\xff';
    CHECK_THROWS_AS(parse_iso2709(bad_utf8), MarcError);
}

TEST_CASE("serializer recomputes length and base address") {
    MarcRecord r = parse_iso2709(testing::test_title_fixture());
    r.data_fields[0].subfields[0].value = "A longer test title";
    const std::string out = serialize_iso2709(r);
    CHECK(out.substr(0, 5) == "00062");
    CHECK(parse_iso2709(out) == [&] { MarcRecord c = r; c.leader = out.substr(0, 24); return c; }());

    r.data_fields[0].subfields[0].value = std::string("bad") + '\x1e';
    CHECK_THROWS_AS(serialize_iso2709(r), MarcError);
}

namespace {

MarcRecord make(std::vector<testing::RawField> fields) {
    return parse_iso2709(assemble_iso2709({"nas a22", " a 4500", std::move(fields)}));
}

} // namespace

TEST_CASE("title profile field mapping") {
    const MarcRecord r = make({{"001", "", {}, "ignored"},
                               {"008", "", {}, "850101d18901910xx wkr ne      0    fre d"},
                               {"010", "  ", {{'a', "  sn 84-020000 "}}, ""},
                               {"041", "0 ", {{'a', "freeng"}}, ""},
                               {"245", "00", {{'a', "L'Abeille :"}, {'b', "journal quotidien /"}}, ""},
                               {"546", "  ", {{'a', "In French and English."}}, ""},
                               {"785", "00", {{'t', "New Era"}, {'w', "(DLC)sn84020000"}}, ""},
                               {"780", "00", {{'t', "Old Bee"}}, ""},
                               {"775", "1 ", {{'w', "(OCoLC)99"}, {'w', "(DLC)  sn 1 "}}, ""},
                               {"765", "0 ", {{'t', "Original"}, {'w', "sn2"}}, ""}});
    const TitleProfile p = extract_title_profile(r);
    CHECK(p.lccn == "sn84-020000");
    CHECK(p.title == "L'Abeille journal quotidien");
    CHECK(p.languages == std::vector<std::string>{"fre", "eng"});
    CHECK(p.language_note == "In French and English.");
    REQUIRE(p.succeeding.size() == 1);
    CHECK(p.succeeding[0] == LinkEntry{"sn84020000", "New Era", "(DLC)sn84020000", "785"});
    REQUIRE(p.preceding.size() == 1);
    CHECK_FALSE(p.preceding[0].target_lccn);
    CHECK(p.preceding[0].target_title == "Old Bee");
    REQUIRE(p.other_language_editions.size() == 1);
    CHECK(p.other_language_editions[0].target_lccn == "sn1");
    REQUIRE(p.translation_of.size() == 1);
    CHECK(p.translation_of[0].target_lccn == "sn2");
}

TEST_CASE("profile extraction is total on sparse records") {
    const TitleProfile p = extract_title_profile(make({{"001", "", {}, "sn9"}}));
    CHECK(p.lccn == "sn9");
    CHECK(p.title.empty());
    CHECK(p.languages.empty());
    CHECK_FALSE(p.language_note);
    CHECK(p.preceding.empty());

    for (const auto& raw : testing::marc_fixture_set()) {
        const MarcRecord r = parse_iso2709(assemble_iso2709(raw));
        if (r.control("001") || !r.fields("010").empty()) CHECK_NOTHROW(extract_title_profile(r));
    }
}

TEST_CASE("missing control number names the title") {
    try {
        extract_title_profile(make({{"245", "00", {{'a', "Nameless Weekly"}}, ""}}));
        FAIL("expected MarcError");
    } catch (const MarcError& e) {
        CHECK(std::string(e.what()).find("Nameless Weekly") != std::string::npos);
    }
}

TEST_CASE("every link has a target") {
    for (const auto& raw : testing::marc_fixture_set()) {
        const MarcRecord r = parse_iso2709(assemble_iso2709(raw));
        if (!r.control("001")) continue;
        const TitleProfile p = extract_title_profile(r);
        for (const auto* links : {&p.preceding, &p.succeeding, &p.other_language_editions, &p.translation_of}) {
            for (const LinkEntry& l : *links) CHECK((l.target_lccn || l.target_title));
        }
    }
}

TEST_CASE("repeated 780 keeps order and prefers the DLC number") {
    const TitleProfile p = extract_title_profile(parse_iso2709(assemble_iso2709(testing::marc_fixture_set()[4])));
    REQUIRE(p.preceding.size() == 3);
    CHECK(p.preceding[0].target_lccn == "sn84000004");
    CHECK(p.preceding[1].target_lccn == "sn84000005");
    CHECK_FALSE(p.preceding[2].target_lccn);
}

TEST_CASE("normalize_lccn is idempotent") {
    for (std::string s : {"  sn 84-020000 ", "SN84020000", "", "\tab c\n"}) {
        CHECK(normalize_lccn(normalize_lccn(s)) == normalize_lccn(s));
    }
    CHECK(normalize_lccn(" SN 84020000 ") == "sn84020000");
}

TEST_CASE("profile json round-trip") {
    for (const auto& raw : testing::marc_fixture_set()) {
        const MarcRecord r = parse_iso2709(assemble_iso2709(raw));
        if (!r.control("001")) continue;
        const TitleProfile p = extract_title_profile(r);
        CHECK(profile_from_json_line(profile_to_json_line(p)) == p);
    }
}

TEST_CASE("read_marc_file dispatches on extension") {
    testing::TempDir dir("marc");
    const auto set = testing::marc_fixture_set();
    std::string mrc;
    for (const auto& raw : set) mrc += assemble_iso2709(raw);
    write_file(dir / "a.mrc", mrc);
    write_file(dir / "a.xml", assemble_marcxml(set));
    CHECK(read_marc_file((dir / "a.mrc").string()) == read_marc_file((dir / "a.xml").string()));
    CHECK_THROWS_AS(read_marc_file((dir / "missing.mrc").string()), InputError);
}
