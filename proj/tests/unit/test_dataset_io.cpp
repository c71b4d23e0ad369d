#include "fixtures.hpp"

#include "fracmorph/dataset.hpp"
#include "fracmorph/errors.hpp"
#include "fracmorph/text.hpp"

#include <doctest.h>

using namespace fracmorph;
using fracmorph::testing::TempDir;

TEST_CASE("parse_box_label_line") {
    const auto [cls, box] = parse_box_label_line("3 0.5 0.5 0.2 0.1");
    CHECK(cls == 3);
    CHECK(box == BBox{0.5, 0.5, 0.2, 0.1});

    CHECK_THROWS_AS(parse_box_label_line("3 0.5 0.5"), MalformedLabelLine);
    CHECK_THROWS_AS(parse_box_label_line("3 0.5 0.5 0.2 0.1 7"), MalformedLabelLine);
    CHECK_THROWS_AS(parse_box_label_line("x 0.5 0.5 0.2 0.1"), MalformedLabelLine);
    CHECK_THROWS_AS(parse_box_label_line("3 0.5 abc 0.2 0.1"), MalformedLabelLine);
    CHECK_THROWS_AS(parse_box_label_line("3 1.5 0.5 0.2 0.1"), OutOfRange);
    CHECK_THROWS_AS(parse_box_label_line("3 0.5 0.5 -0.2 0.1"), OutOfRange);
    CHECK_THROWS_AS(parse_box_label_line("3 0.5 0.5 0 0.1"), OutOfRange);

    try {
        parse_box_label_line("1 2", 17);
        FAIL("expected MalformedLabelLine");
    } catch (const MalformedLabelLine& e) {
        CHECK(e.line_no() == 17);
    }
}

TEST_CASE("box pixel conversion is clipped to the image") {
    const BBox box{0.05, 0.5, 0.2, 0.5};
    const auto px = box.to_pixels(100, 50);
    CHECK(px.x0 == 0.0);
    CHECK(px.x1 == doctest::Approx(15.0));
    CHECK(px.y0 == doctest::Approx(12.5));
    CHECK(px.y1 == doctest::Approx(37.5));
    CHECK(box.to_rect(100, 50) == PixelRect{0, 12, 15, 38});
}

TEST_CASE("load_dataset on a three-image fixture") {
    TempDir dir;
    testing::write_dataset(dir.path(), {{"a", {0}, {"23r-M/3.1"}}, {"b", {}, {}}, {"c", {1, 2}, {"22-D/4.1"}}});
    DatasetLayout layout;
    layout.root = dir.path();
    const auto result = load_dataset(layout);
    CHECK(result.rejected.empty());
    REQUIRE(result.records.size() == 3);
    CHECK(result.records[0].image_id == "a");
    CHECK(result.records[1].image_id == "b");
    CHECK(result.records[2].image_id == "c");

    // Fracture boxes only; the class-8 line is skipped.
    CHECK(result.records[0].boxes.size() == 1);
    CHECK(result.records[1].boxes.empty());
    CHECK(result.records[2].boxes.size() == 2);
    CHECK(result.records[1].ao_codes.empty());
    CHECK(result.records[2].ao_codes.size() == 1);
    CHECK(result.records[0].width_px == testing::kImageWidth);
    CHECK(result.records[0].height_px == testing::kImageHeight);
    CHECK(result.records[0].split == Split::Unassigned);

    layout.fracture_class = -1;
    CHECK(load_dataset(layout).records[1].boxes.size() == 1);
}

TEST_CASE("load_dataset rejects bad rows with a report") {
    TempDir dir;
    testing::write_dataset(dir.path(), {{"good", {0}, {"23r-M/3.1"}}, {"badlabel", {0}, {"23r-M/3.1"}}});
    write_file_atomic(dir / "labels/badlabel.txt", "3 0.5 0.5\n");
    write_file_atomic(dir / "dataset.csv",
                      "filestem,ao_classification,width,height\n"
                      "good,23r-M/3.1,,\n"
                      "badlabel,23r-M/3.1,,\n"
                      "badcode,22X4,80,60\n"
                      "nosize,,,\n"
                      "good,,80,60\n"
                      "sized,,120,90\n");
    DatasetLayout layout;
    layout.root = dir.path();
    const auto result = load_dataset(layout);
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].image_id == "good");
    CHECK(result.records[1].image_id == "sized");
    CHECK(result.records[1].width_px == 120);
    CHECK(result.records[1].height_px == 90);
    REQUIRE(result.rejected.size() == 4);
    CHECK(result.rejected[0].image_id == "badlabel");
    CHECK(result.rejected[0].line == 3);
    CHECK(result.rejected[1].image_id == "badcode");
    CHECK(result.rejected[2].image_id == "nosize");
    CHECK(result.rejected[3].message.find("duplicate") != std::string::npos);
}

TEST_CASE("load_dataset file-level errors") {
    TempDir dir;
    DatasetLayout layout;
    layout.root = dir.path();
    CHECK_THROWS_AS(load_dataset(layout), MissingFile);
    write_file_atomic(dir / "dataset.csv", "name,codes\nx,\n");
    CHECK_THROWS_AS(load_dataset(layout), MetadataSchemaError);
    write_file_atomic(dir / "dataset.csv", "filestem,ao_classification\nx,a,b\n");
    CHECK_THROWS_AS(load_dataset(layout), MetadataSchemaError);
}

TEST_CASE("segmentation masks") {
    TempDir dir;
    LabelImage img(4, 3, 1);
    img.at(3, 2) = 4;
    write_label_png(dir / "m.png", img);
    const auto mask = load_mask(dir / "m.png", MaskLegend::default_legend());
    CHECK(mask.labels == img);

    img.at(0, 0) = 9;
    write_label_png(dir / "bad.png", img);
    CHECK_THROWS_AS(load_mask(dir / "bad.png", MaskLegend::default_legend()), ImageError);
    CHECK_THROWS_AS(load_mask(dir / "absent.png", MaskLegend::default_legend()), MissingFile);

    write_file_atomic(dir / "notpng.png", "hello");
    CHECK_THROWS_AS(read_label_png(dir / "notpng.png"), ImageError);
    CHECK(read_png_size(dir / "m.png").width == 4);
}
