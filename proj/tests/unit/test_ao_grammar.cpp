#include "fixtures.hpp"

#include "fracmorph/ao_code.hpp"
#include "fracmorph/errors.hpp"
#include "fracmorph/mapping_table.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace fracmorph;

namespace {

std::size_t malformed_offset(const std::string& text) {
    try {
        parse_ao_code(text);
    } catch (const MalformedCode& e) {
        return e.position();
    }
    FAIL("expected MalformedCode for '" << text << "'");
    return 0;
}

// Random grammar-valid code text.
std::string random_code(std::mt19937_64& rng) {
    std::string s;
    const auto digits = 1 + rng() % 3;
    for (std::size_t i = 0; i < digits; ++i) s += static_cast<char>('0' + rng() % 10);
    switch (rng() % 3) {
        case 0: s += 'r'; break;
        case 1: s += 'u'; break;
        default: break;
    }
    s += '-';
    s += static_cast<char>('A' + rng() % 26);
    s += '/';
    const auto groups = 1 + rng() % 3;
    for (std::size_t g = 0; g < groups; ++g) {
        if (g) s += '.';
        const auto len = 1 + rng() % 2;
        for (std::size_t i = 0; i < len; ++i) s += static_cast<char>('0' + rng() % 10);
    }
    return s;
}

}  // namespace

TEST_CASE("parse bone-specific and dual-bone codes") {
    const auto r = parse_ao_code("22r-D/4.1");
    CHECK(r.location == "22");
    CHECK(r.bone_qualifier == BoneQualifier::Radius);
    CHECK(r.fracture_type == 'D');
    CHECK(r.sub_classification == "4.1");
    CHECK(r.raw == "22r-D/4.1");

    const auto both = parse_ao_code("22-D/4.1");
    CHECK(both.location == "22");
    CHECK(both.bone_qualifier == BoneQualifier::Both);
    CHECK(both.fracture_type == 'D');
    CHECK(both.sub_classification == "4.1");

    CHECK(parse_ao_code("23u-E/7").bone_qualifier == BoneQualifier::Ulna);
    CHECK(parse_ao_code("23u-E/7").sub_classification == "7");
}

TEST_CASE("codes outside the forearm have no bone qualifier") {
    const auto c = parse_ao_code("77-D/1");
    CHECK(c.bone_qualifier == BoneQualifier::None);
    CHECK(expand_dual_bone(c).size() == 1);
}

TEST_CASE("unknown fracture-type letters still parse") {
    CHECK(parse_ao_code("23r-Q/9.9.9").fracture_type == 'Q');
}

TEST_CASE("malformed codes report the offending offset") {
    CHECK(malformed_offset("22X4") == 2);
    CHECK(malformed_offset("") == 0);
    CHECK(malformed_offset("r-D/4") == 0);
    CHECK(malformed_offset("22r") == 3);
    CHECK(malformed_offset("22r-d/4.1") == 4);
    CHECK(malformed_offset("22r-DD/4.1") == 5);
    CHECK(malformed_offset("22r-D/") == 6);
    CHECK(malformed_offset("22r-D/4.") == 8);
    CHECK(malformed_offset("22r-D/4..1") == 8);
    CHECK(malformed_offset("22r-D/.4") == 6);
    CHECK(malformed_offset("22r-D/4.1 ") == 9);
    CHECK(malformed_offset("22r-D/4.1x") == 9);
}

TEST_CASE("render round-trips generated codes") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        const auto text = random_code(rng);
        const auto code = parse_ao_code(text);
        CHECK(code.render() == text);
        CHECK(parse_ao_code(code.render()) == code);
    }
}

TEST_CASE("dual-bone expansion") {
    const auto out = expand_dual_bone(parse_ao_code("22-D/4.1"));
    REQUIRE(out.size() == 2);
    CHECK(out[0].render() == "22r-D/4.1");
    CHECK(out[1].render() == "22u-D/4.1");

    const auto single = expand_dual_bone(parse_ao_code("22r-D/4.1"));
    REQUIRE(single.size() == 1);
    CHECK(single[0].render() == "22r-D/4.1");

    const std::vector<AoCode> list{parse_ao_code("22-D/4.1"), parse_ao_code("23u-E/2")};
    std::size_t expected = 0;
    for (const auto& c : list) expected += c.bone_qualifier == BoneQualifier::Both ? 2 : 1;
    CHECK(expected == 3);
    CHECK(expand_dual_bone(list).size() == expected);
}

TEST_CASE("expansion never yields both and has size 1 or 2") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
        const auto code = parse_ao_code(random_code(rng));
        const auto out = expand_dual_bone(code);
        CHECK((out.size() == 1 || out.size() == 2));
        for (const auto& c : out) CHECK(c.bone_qualifier != BoneQualifier::Both);
    }
}

TEST_CASE("code lists split on semicolons") {
    const auto codes = parse_ao_code_list(" 23r-M/2.1; 23u-M/2.1 ;");
    REQUIRE(codes.size() == 2);
    CHECK(codes[1].render() == "23u-M/2.1");
    CHECK(parse_ao_code_list("").empty());
    CHECK_THROWS_AS(parse_ao_code_list("23r-M/2.1;bogus"), MalformedCode);
}

TEST_CASE("morphology lookup") {
    const auto table = testing::illustrative_mapping();
    CHECK(morphology_of(parse_ao_code("23r-M/3.1"), table) == "Transverse");
    CHECK_THROWS_AS(morphology_of(parse_ao_code("23r-M/9.9"), table), UnmappedCode);
    CHECK(morphology_of(parse_ao_code("23r-M/3.1"), table) == morphology_of(parse_ao_code("23r-M/3.1"), table));
}

TEST_CASE("illustrative table: 18 codes map onto 5 morphologies") {
    const auto table = testing::illustrative_mapping();
    CHECK(table.entries().size() == 18);
    std::set<std::string> codes, classes;
    for (const auto& e : table.entries()) {
        codes.insert(e.pattern.render());
        classes.insert(morphology_of(e.pattern, table));
        CHECK(e.pattern.is_bone_specific());
    }
    CHECK(codes.size() == 18);
    CHECK(classes.size() == 5);
    CHECK(table.classes().size() == 5);
}

TEST_CASE("mapping table schema") {
    SUBCASE("dual-bone patterns expand to both bones") {
        const auto t = MappingTable::parse("ao_pattern,morphology\n22-D/4.1,Transverse\n");
        REQUIRE(t.entries().size() == 2);
        CHECK(morphology_of(parse_ao_code("22u-D/4.1"), t) == "Transverse");
    }
    SUBCASE("comments and blank lines are skipped") {
        const auto t = MappingTable::parse("# header comment\nao_pattern,morphology\n\n# x\n23r-E/7,Avulsion\n");
        CHECK(t.entries().size() == 1);
    }
    SUBCASE("a pattern cannot map to two morphologies") {
        CHECK_THROWS_AS(MappingTable::parse("ao_pattern,morphology\n23r-E/7,Avulsion\n23r-E/7,Transverse\n"),
                        MappingConflict);
        CHECK_THROWS_AS(MappingTable::parse("ao_pattern,morphology\n22-D/4.1,A\n22u-D/4.1,B\n"), MappingConflict);
    }
    SUBCASE("repeating an identical entry is harmless") {
        CHECK(MappingTable::parse("ao_pattern,morphology\n23r-E/7,Avulsion\n23r-E/7,Avulsion\n").entries().size() == 1);
    }
    SUBCASE("Healthy is reserved") {
        CHECK_THROWS_AS(MappingTable::parse("ao_pattern,morphology\n23r-E/7,Healthy\n"), MappingConflict);
    }
    SUBCASE("patterns must resolve to a bone") {
        CHECK_THROWS_AS(MappingTable::parse("ao_pattern,morphology\n77-D/1,X\n"), MappingConflict);
    }
    SUBCASE("bad pattern text") {
        CHECK_THROWS_AS(MappingTable::parse("ao_pattern,morphology\n22X4,X\n"), MappingConflict);
    }
    SUBCASE("missing columns") {
        CHECK_THROWS_AS(MappingTable::parse("code,class\n23r-E/7,Avulsion\n"), SchemaError);
    }
}
