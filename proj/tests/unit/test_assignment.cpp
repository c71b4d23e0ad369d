#include "fixtures.hpp"

#include "fracmorph/assignment.hpp"
#include "fracmorph/errors.hpp"

#include <doctest.h>

#include <random>

using namespace fracmorph;

namespace {

SegmentationMask mask_of(LabelImage labels) { return {std::move(labels), MaskLegend::default_legend()}; }

/// Fixed mask for every record: left half radius, right half ulna.
MaskProvider halves_provider(int width, int height) {
    return [=](const ImageRecord&) {
        LabelImage m(width, height, 0);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) m.at(x, y) = x < width / 2 ? 1 : 2;
        }
        return mask_of(std::move(m));
    };
}

BBox box_of(const PixelRect& r, int width, int height) {
    return {(r.x0 + r.x1) / 2.0 / width, (r.y0 + r.y1) / 2.0 / height, double(r.width()) / width,
            double(r.height()) / height};
}

ImageRecord record(std::string id, std::vector<PixelRect> rects, std::vector<std::string> codes,
                   Split split = Split::Unassigned) {
    ImageRecord r;
    r.image_id = std::move(id);
    r.width_px = 100;
    r.height_px = 100;
    for (const auto& rect : rects) r.boxes.push_back(box_of(rect, 100, 100));
    for (const auto& c : codes) r.ao_codes.push_back(parse_ao_code(c));
    r.split = split;
    return r;
}

const PixelRect kRadiusBox{10, 10, 30, 30};
const PixelRect kUlnaBox{60, 10, 80, 30};

}  // namespace

TEST_CASE("bone vote") {
    SUBCASE("box inside the radius") {
        LabelImage m(10, 10, 1);
        const auto v = bone_of_box(PixelRect{0, 0, 10, 10}, mask_of(m));
        CHECK(v.bone == BoneClass::Radius);
        CHECK(v.radius_pixels == 100);
        CHECK_FALSE(v.tie);
    }
    SUBCASE("epiphysis pixels count for their bone") {
        LabelImage m(10, 10, 3);
        for (int y = 6; y < 10; ++y) {
            for (int x = 0; x < 10; ++x) m.at(x, y) = 2;
        }
        const auto v = bone_of_box(PixelRect{0, 0, 10, 10}, mask_of(m));
        CHECK(v.radius_pixels == 60);
        CHECK(v.ulna_pixels == 40);
        CHECK(v.bone == BoneClass::Radius);
    }
    SUBCASE("ulna epiphysis wins a majority") {
        LabelImage m(4, 4, 4);
        m.at(0, 0) = 1;
        CHECK(bone_of_box(PixelRect{0, 0, 4, 4}, mask_of(m)).bone == BoneClass::Ulna);
    }
    SUBCASE("only background") {
        CHECK_THROWS_AS(bone_of_box(PixelRect{0, 0, 5, 5}, mask_of(LabelImage(10, 10, 0))), NoBonePixels);
    }
    SUBCASE("ties go to radius and are flagged") {
        LabelImage m(4, 2, 1);
        for (int y = 0; y < 2; ++y) m.at(2, y) = m.at(3, y) = 2;
        const auto v = bone_of_box(PixelRect{0, 0, 4, 2}, mask_of(m));
        CHECK(v.tie);
        CHECK(v.bone == BoneClass::Radius);
    }
    SUBCASE("box clipped away entirely") {
        CHECK_THROWS_AS(bone_of_box(PixelRect{20, 20, 30, 30}, mask_of(LabelImage(10, 10, 1))), EmptyCrop);
    }
    SUBCASE("normalized boxes use the mask size") {
        LabelImage m(10, 10, 2);
        CHECK(bone_of_box(BBox{0.5, 0.5, 0.2, 0.2}, mask_of(m)).ulna_pixels == 4);
    }
}

TEST_CASE("vote agrees with a direct pixel count") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        LabelImage m(12, 9, 0);
        for (auto& p : m.pixels()) p = static_cast<std::uint8_t>(rng() % 5);
        const PixelRect r{int(rng() % 6), int(rng() % 4), 6 + int(rng() % 7), 4 + int(rng() % 6)};
        std::size_t radius = 0, ulna = 0;
        for (int y = r.y0; y < r.y1; ++y) {
            for (int x = r.x0; x < r.x1; ++x) {
                const auto v = m.at(x, y);
                radius += v == 1 || v == 3;
                ulna += v == 2 || v == 4;
            }
        }
        if (radius + ulna == 0) {
            CHECK_THROWS_AS(bone_of_box(r, mask_of(m)), NoBonePixels);
            continue;
        }
        const auto vote = bone_of_box(r, mask_of(m));
        CHECK(vote.radius_pixels == radius);
        CHECK(vote.ulna_pixels == ulna);
        CHECK(vote.bone == (ulna > radius ? BoneClass::Ulna : BoneClass::Radius));
    }
}

TEST_CASE("box to code matching") {
    using B = std::optional<BoneClass>;
    SUBCASE("one box, one code") {
        const std::vector<B> bones{BoneClass::Radius};
        const std::vector<AoCode> codes{parse_ao_code("23r-M/3.1")};
        const auto m = match_boxes_to_codes(bones, codes);
        REQUIRE(m.pairs.size() == 1);
        CHECK(m.pairs[0].box == 0);
        CHECK(m.pairs[0].code == 0);
        CHECK(m.unmatched_boxes.empty());
        CHECK(m.unmatched_codes.empty());
    }
    SUBCASE("dual-bone code pairs with one box per bone") {
        const std::vector<B> bones{BoneClass::Ulna, BoneClass::Radius};
        const auto codes = expand_dual_bone(std::vector<AoCode>{parse_ao_code("22-D/4.1")});
        const auto m = match_boxes_to_codes(bones, codes);
        REQUIRE(m.pairs.size() == 2);
        CHECK(codes[m.pairs[0].code].render() == "22u-D/4.1");
        CHECK(codes[m.pairs[1].code].render() == "22r-D/4.1");
    }
    SUBCASE("surplus box is reported") {
        const std::vector<B> bones{BoneClass::Radius, BoneClass::Radius};
        const std::vector<AoCode> codes{parse_ao_code("23r-M/3.1")};
        const auto m = match_boxes_to_codes(bones, codes);
        REQUIRE(m.pairs.size() == 1);
        CHECK(m.pairs[0].box == 0);
        CHECK(m.unmatched_boxes == std::vector<std::size_t>{1});
        CHECK_FALSE(m.order_ambiguous);
    }
    SUBCASE("surplus code and unknown-bone box") {
        const std::vector<B> bones{std::nullopt};
        const std::vector<AoCode> codes{parse_ao_code("23u-E/7"), parse_ao_code("77-D/1")};
        const auto m = match_boxes_to_codes(bones, codes);
        CHECK(m.pairs.empty());
        CHECK(m.unmatched_boxes == std::vector<std::size_t>{0});
        CHECK(m.unmatched_codes == std::vector<std::size_t>{0, 1});
    }
    SUBCASE("distinct same-bone codes are flagged as order dependent") {
        const std::vector<B> bones{BoneClass::Radius, BoneClass::Radius};
        const std::vector<AoCode> codes{parse_ao_code("23r-M/3.1"), parse_ao_code("23r-E/7")};
        const auto m = match_boxes_to_codes(bones, codes);
        CHECK(m.pairs.size() == 2);
        CHECK(m.order_ambiguous);
    }
}

TEST_CASE("matching accounts for every box and code") {
    std::mt19937_64 rng(17);
    const std::vector<std::string> pool{"23r-M/3.1", "23u-E/7", "22r-D/2.1", "22u-D/4.1", "77-A/1"};
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<std::optional<BoneClass>> bones(rng() % 5);
        for (auto& b : bones) {
            const auto k = rng() % 3;
            b = k == 0 ? std::optional<BoneClass>() : k == 1 ? BoneClass::Radius : BoneClass::Ulna;
        }
        std::vector<AoCode> codes(rng() % 5);
        for (auto& c : codes) c = parse_ao_code(pool[rng() % pool.size()]);
        const auto m = match_boxes_to_codes(bones, codes);
        CHECK(m.pairs.size() + m.unmatched_boxes.size() == bones.size());
        CHECK(m.pairs.size() + m.unmatched_codes.size() == codes.size());
        for (const auto& p : m.pairs) {
            CHECK(bones[p.box] == bone_of_qualifier(codes[p.code].bone_qualifier));
        }
        std::size_t radius_boxes = 0, radius_codes = 0;
        for (const auto& b : bones) radius_boxes += b == BoneClass::Radius;
        for (const auto& c : codes) radius_codes += c.bone_qualifier == BoneQualifier::Radius;
        std::size_t radius_pairs = 0;
        for (const auto& p : m.pairs) radius_pairs += bones[p.box] == BoneClass::Radius;
        CHECK(radius_pairs == std::min(radius_boxes, radius_codes));
    }
}

TEST_CASE("patch emission with the min_count filter") {
    // Eleven classes with train counts 1,2,3,5,8,9,10,12,15,20,30.
    const std::vector<std::size_t> counts{1, 2, 3, 5, 8, 9, 10, 12, 15, 20, 30};
    std::string csv = "ao_pattern,morphology\n";
    for (std::size_t c = 0; c < counts.size(); ++c) {
        csv += "23r-M/" + std::to_string(c + 1) + ",K" + std::to_string(c) + "\n";
    }
    const auto mapping = MappingTable::parse(csv);

    std::vector<ImageRecord> records;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        for (std::size_t i = 0; i < counts[c]; ++i) {
            const auto id = "K" + std::to_string(c) + "_" + std::to_string(i);
            records.push_back(record(id, {kRadiusBox}, {"23r-M/" + std::to_string(c + 1)}, Split::Train));
        }
        // Validation copies do not count towards the threshold.
        records.push_back(record("V" + std::to_string(c), {kRadiusBox}, {"23r-M/" + std::to_string(c + 1)}, Split::Val));
    }

    const auto result = emit_patch_labels(records, mapping, halves_provider(100, 100), {10, 0.0});
    CHECK(result.retained_classes == std::vector<std::string>{"K10", "K6", "K7", "K8", "K9"});
    CHECK(result.class_counts.at("K6") == 10);
    CHECK(result.excluded_classes.size() == 6);
    std::size_t expected = 0;
    for (std::size_t c = 6; c < counts.size(); ++c) expected += counts[c] + 1;
    CHECK(result.patches.size() == expected);
    for (const auto& p : result.patches) CHECK(result.class_counts.at(p.morphology) >= 10);
    CHECK(result.diagnostics.count(DiagnosticKind::ExcludedClass) == 1 + 2 + 3 + 5 + 8 + 9 + 6);

    const auto all = emit_patch_labels(records, mapping, halves_provider(100, 100), {0, 0.0});
    CHECK(all.retained_classes.size() == 11);
    CHECK(all.patches.size() == records.size());
}

TEST_CASE("patch emission invariants and diagnostics") {
    const auto mapping = testing::illustrative_mapping();
    const std::vector<ImageRecord> records{
        record("b", {kRadiusBox, kUlnaBox}, {"22-D/4.1"}),
        record("a", {kRadiusBox}, {"23r-M/9.9"}),
        record("c", {kRadiusBox, {10, 40, 30, 60}}, {"23r-E/7"}),
        record("d", {}, {"23u-M/3.1", "77-A/1"}),
        record("e", {{45, 10, 55, 30}}, {"23r-M/3.1"}),
    };
    const auto result = emit_patch_labels(records, mapping, halves_provider(100, 100), {0, 0.25});

    REQUIRE(result.patches.size() == 4);
    CHECK(result.patches[0].image_id == "b");
    CHECK(result.patches[0].bone == BoneClass::Radius);
    CHECK(result.patches[0].source_code.render() == "22r-D/4.1");
    CHECK(result.patches[1].bone == BoneClass::Ulna);
    CHECK(result.patches[1].morphology == "Transverse");
    CHECK(result.patches[2].image_id == "c");
    CHECK(result.patches[2].morphology == "Avulsion");
    CHECK(result.patches[3].image_id == "e");
    CHECK(result.patches[3].box_rect == PixelRect{45, 10, 55, 30});
    CHECK(result.patches[3].crop_rect == PixelRect{42, 5, 58, 35});

    const auto& d = result.diagnostics;
    CHECK(d.count(DiagnosticKind::UnmappedCode) == 1);
    CHECK(d.count(DiagnosticKind::UnmatchedBox) == 1);
    CHECK(d.count(DiagnosticKind::UnmatchedCode) == 1);
    CHECK(d.count(DiagnosticKind::NoBoneCode) == 1);
    CHECK(d.count(DiagnosticKind::BoneTie) == 1);

    for (const auto& p : result.patches) {
        CHECK(p.bone == *bone_of_qualifier(p.source_code.bone_qualifier));
        CHECK(p.morphology == morphology_of(p.source_code, mapping));
    }
    CHECK(render_diagnostics(d).find("UnmappedCode\ta\t23r-M/9.9") != std::string::npos);
}

TEST_CASE("mask failures become diagnostics") {
    const auto mapping = testing::illustrative_mapping();
    const std::vector<ImageRecord> records{record("x", {kRadiusBox}, {"23r-M/3.1"})};
    const MaskProvider failing = [](const ImageRecord&) -> SegmentationMask { throw MissingFile("nope.png"); };
    const auto result = emit_patch_labels(records, mapping, failing, {});
    CHECK(result.patches.empty());
    CHECK(result.diagnostics.count(DiagnosticKind::MaskError) == 1);

    const auto small = emit_patch_labels(records, mapping, halves_provider(50, 50), {});
    CHECK(small.diagnostics.count(DiagnosticKind::MaskError) == 1);
}

TEST_CASE("multilabel targets") {
    const auto mapping = testing::illustrative_mapping();
    const std::vector<ImageRecord> records{
        record("c", {}, {"23r-M/3.1", "23u-M/3.1", "23r-E/7"}),
        record("a", {}, {}),
        record("b", {}, {"22-D/4.1"}),
        record("d", {}, {"23r-M/9.9"}),
    };
    const auto targets = build_multilabel_targets(records, mapping);
    REQUIRE(targets.size() == 4);
    CHECK(targets[0] == MultilabelTarget{"a", {}});
    CHECK(targets[1] == MultilabelTarget{"b", {"Transverse"}});
    CHECK(targets[2] == MultilabelTarget{"c", {"Avulsion", "Transverse"}});
    CHECK(targets[3] == MultilabelTarget{"d", {}});

    const auto filtered = build_multilabel_targets(records, mapping, std::set<std::string>{"Avulsion"});
    CHECK(filtered[2].present == std::set<std::string>{"Avulsion"});
    CHECK(filtered[1].present.empty());

    CHECK(record_morphologies(records[0], mapping).size() == 3);
    CHECK(parse_multilabel_file(render_multilabel_file(targets)) == targets);
}

TEST_CASE("patch manifest round trip") {
    const auto mapping = testing::illustrative_mapping();
    const std::vector<ImageRecord> records{record("b", {kRadiusBox, kUlnaBox}, {"22-D/4.1"}),
                                           record("a", {kUlnaBox}, {"23u-E/7"})};
    const auto result = emit_patch_labels(records, mapping, halves_provider(100, 100), {});
    const auto text = render_patch_manifest(result.patches);
    CHECK(text.rfind("image_id,x0,y0,x1,y1,bone,morphology,source_code\n", 0) == 0);
    CHECK(text.find("a,60,10,80,30,ulna,Avulsion,23u-E/7\n") != std::string::npos);
    const auto back = parse_patch_manifest(text);
    REQUIRE(back.size() == result.patches.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].image_id == result.patches[i].image_id);
        CHECK(back[i].box_rect == result.patches[i].box_rect);
        CHECK(back[i].bone == result.patches[i].bone);
        CHECK(back[i].morphology == result.patches[i].morphology);
        CHECK(back[i].source_code == result.patches[i].source_code);
    }
    CHECK_THROWS_AS(parse_patch_manifest("image_id,x0,y0,x1,y1,bone,morphology,source_code\na,1,1,1,5,radius,X,23r-E/7\n"),
                    SchemaError);
    CHECK_THROWS_AS(parse_patch_manifest("image_id,x0,y0,x1,y1,bone,morphology,source_code\na,1,1,3,5,femur,X,23r-E/7\n"),
                    SchemaError);
}
