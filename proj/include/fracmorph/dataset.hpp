#pragma once

#include "fracmorph/ao_code.hpp"
#include "fracmorph/geometry.hpp"
#include "fracmorph/raster.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fracmorph {

enum class Split { Train, Val, Test, Unassigned };

std::string_view to_string(Split s);
/// Accepts "train", "val", "test", "unassigned".
std::optional<Split> parse_split(std::string_view name);

struct ImageRecord {
    std::string image_id;
    int width_px = 0;
    int height_px = 0;
    std::vector<BBox> boxes;       // fracture boxes, label-file order
    std::vector<AoCode> ao_codes;  // as annotated, before dual-bone expansion
    std::filesystem::path mask_path;
    std::filesystem::path image_path;
    Split split = Split::Unassigned;
};

/// Raw mask classes. Epiphyses fold to their parent bone for matching.
enum class MaskClass { Background, Radius, Ulna, RadiusEpiphysis, UlnaEpiphysis };

std::optional<MaskClass> parse_mask_class(std::string_view name);

/// Pixel value -> mask class. Values missing from the legend are an error.
class MaskLegend {
public:
    MaskLegend() = default;
    explicit MaskLegend(std::map<int, MaskClass> entries);

    /// 0 background, 1 radius, 2 ulna, 3 radius epiphysis, 4 ulna epiphysis.
    static MaskLegend default_legend();

    const MaskClass* lookup(int value) const;
    const std::map<int, MaskClass>& entries() const noexcept { return entries_; }

private:
    std::map<int, MaskClass> entries_;
};

struct SegmentationMask {
    LabelImage labels;
    MaskLegend legend;

    /// Throws ImageError if any pixel value is missing from the legend.
    void validate() const;
};

SegmentationMask load_mask(const std::filesystem::path& path, const MaskLegend& legend);

/// One line of a detector label file: "class cx cy w h".
/// Throws MalformedLabelLine (field count / non-numeric) or OutOfRange.
std::pair<int, BBox> parse_box_label_line(std::string_view line, std::size_t line_no = 1);

struct DatasetLayout {
    std::filesystem::path root;
    std::string metadata_file = "dataset.csv";
    std::string labels_dir = "labels";
    std::string masks_dir = "masks";
    std::string images_dir = "images";
    /// Label-file class index of fractures; negative keeps every box.
    int fracture_class = 3;

    std::filesystem::path metadata_path() const { return root / metadata_file; }
    std::filesystem::path label_path(const std::string& stem) const { return root / labels_dir / (stem + ".txt"); }
    std::filesystem::path mask_path(const std::string& stem) const { return root / masks_dir / (stem + ".png"); }
    std::filesystem::path image_path(const std::string& stem) const { return root / images_dir / (stem + ".png"); }
};

struct RecordError {
    std::size_t line = 0;  // metadata line number
    std::string image_id;
    std::string message;
};

struct LoadResult {
    std::vector<ImageRecord> records;
    std::vector<RecordError> rejected;
};

/// Reads the metadata table (columns `filestem`, `ao_classification`, and
/// optionally `width`, `height`) plus one label file per image.
///
/// Image size comes from the metadata when present, otherwise from the mask
/// or image PNG header. A missing label file means no boxes. Rows with
/// unparseable codes, bad label lines or unknown size are rejected into
/// LoadResult::rejected. Throws MissingFile / MetadataSchemaError for
/// problems with the metadata file itself.
LoadResult load_dataset(const DatasetLayout& layout);

/// Only the `filestem` column, in file order.
std::vector<std::string> load_image_ids(const DatasetLayout& layout);

}  // namespace fracmorph
