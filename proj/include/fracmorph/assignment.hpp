#pragma once

#include "fracmorph/ao_code.hpp"
#include "fracmorph/dataset.hpp"
#include "fracmorph/geometry.hpp"
#include "fracmorph/mapping_table.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace fracmorph {

enum class BoneClass { Radius, Ulna };

std::string_view to_string(BoneClass b);
std::optional<BoneClass> parse_bone(std::string_view name);

/// Epiphyses fold to their parent bone; background has no bone.
std::optional<BoneClass> fold(MaskClass c) noexcept;
std::optional<BoneClass> bone_of_qualifier(BoneQualifier q) noexcept;

struct BoneVote {
    BoneClass bone = BoneClass::Radius;
    std::size_t radius_pixels = 0;
    std::size_t ulna_pixels = 0;
    bool tie = false;  // equal counts, resolved to radius
};

/// Majority folded bone class of the mask pixels inside `rect`.
/// Throws NoBonePixels when the rectangle holds only background, EmptyCrop
/// when it is empty after clipping.
BoneVote bone_of_box(const PixelRect& rect, const SegmentationMask& mask);

/// Same, converting `box` with the mask's dimensions as the image size.
BoneVote bone_of_box(const BBox& box, const SegmentationMask& mask);

enum class DiagnosticKind {
    UnmatchedBox,
    UnmatchedCode,
    UnmappedCode,
    NoBoneCode,      // code without radius/ulna qualifier on a non-forearm segment
    NoBonePixels,
    BoneTie,
    OrderAmbiguity,  // several same-bone pairs resolved by input order
    MaskError,
    ExcludedClass,
};

std::string_view to_string(DiagnosticKind k);

struct Diagnostic {
    std::string image_id;
    DiagnosticKind kind;
    std::string detail;
};

struct Diagnostics {
    std::vector<Diagnostic> items;

    void add(std::string image_id, DiagnosticKind kind, std::string detail) {
        items.push_back({std::move(image_id), kind, std::move(detail)});
    }
    void merge(const Diagnostics& other) { items.insert(items.end(), other.items.begin(), other.items.end()); }
    std::size_t count(DiagnosticKind kind) const;
    std::map<DiagnosticKind, std::size_t> counts() const;
};

struct BoxCodePair {
    std::size_t box = 0;   // index into the box list
    std::size_t code = 0;  // index into the expanded code list
};

struct MatchResult {
    std::vector<BoxCodePair> pairs;  // sorted by box index
    std::vector<std::size_t> unmatched_boxes;
    std::vector<std::size_t> unmatched_codes;
    bool order_ambiguous = false;
};

/// Pairs boxes and (already expanded) codes of the same bone. Within a bone
/// the k-th box pairs with the k-th code in input order; surplus entries on
/// either side are reported as unmatched. Boxes whose bone is unknown
/// (nullopt) and codes that are not bone-specific are unmatched.
MatchResult match_boxes_to_codes(std::span<const std::optional<BoneClass>> box_bones, std::span<const AoCode> codes);

struct PatchLabel {
    std::string image_id;
    BBox box;
    PixelRect box_rect;   // box in pixels, no margin
    PixelRect crop_rect;  // box_rect grown by the crop margin, clipped
    BoneClass bone = BoneClass::Radius;
    MorphologyClass morphology;
    AoCode source_code;
    Split split = Split::Unassigned;
    std::size_t box_index = 0;  // position in the image's label file
};

using MaskProvider = std::function<SegmentationMask(const ImageRecord&)>;

/// Loads `record.mask_path` with the given legend.
MaskProvider file_mask_provider(MaskLegend legend);

struct ExtractOptions {
    std::size_t min_count = 0;
    double crop_margin = 0.0;  // fraction of box size per side
};

struct ExtractResult {
    std::vector<PatchLabel> patches;
    Diagnostics diagnostics;
    std::vector<MorphologyClass> retained_classes;          // sorted
    std::map<MorphologyClass, std::size_t> class_counts;   // basis of the min_count filter
    std::vector<MorphologyClass> excluded_classes;
};

/// Runs bone assignment, matching and morphology lookup over all records,
/// then drops classes whose train-split patch count is below min_count
/// (a count equal to min_count is kept). When no record is in the train
/// split the counts are taken over all records. Output is ordered by
/// image id, then box index.
ExtractResult emit_patch_labels(const std::vector<ImageRecord>& records, const MappingTable& mapping,
                                const MaskProvider& masks, const ExtractOptions& options);

struct MultilabelTarget {
    std::string image_id;
    std::set<MorphologyClass> present;

    friend bool operator==(const MultilabelTarget&, const MultilabelTarget&) = default;
};

/// Union of the morphologies of an image's expanded, mapped codes.
/// Unmapped codes are skipped; when `retained` is given, classes outside it
/// are dropped. Ordered by image id.
std::vector<MultilabelTarget> build_multilabel_targets(const std::vector<ImageRecord>& records,
                                                       const MappingTable& mapping,
                                                       const std::optional<std::set<MorphologyClass>>& retained = {});

/// Mapped morphologies of a record's expanded codes (multiset, code order).
std::vector<MorphologyClass> record_morphologies(const ImageRecord& record, const MappingTable& mapping);

/// `image_id,x0,y0,x1,y1,bone,morphology,source_code`; coordinates are box_rect.
std::string render_patch_manifest(const std::vector<PatchLabel>& patches);
std::vector<PatchLabel> parse_patch_manifest(std::string_view content, const std::string& source = "<memory>");
std::vector<PatchLabel> load_patch_manifest(const std::filesystem::path& path);

/// `image_id,classes` with classes ';'-separated.
std::string render_multilabel_file(const std::vector<MultilabelTarget>& targets);
std::vector<MultilabelTarget> parse_multilabel_file(std::string_view content, const std::string& source = "<memory>");
std::vector<MultilabelTarget> load_multilabel_file(const std::filesystem::path& path);

/// `kind<TAB>image_id<TAB>detail` lines.
std::string render_diagnostics(const Diagnostics& diagnostics);

}  // namespace fracmorph
