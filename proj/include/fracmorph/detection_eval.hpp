#pragma once

#include "fracmorph/assignment.hpp"
#include "fracmorph/geometry.hpp"
#include "fracmorph/mapping_table.hpp"

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace fracmorph {

struct Prediction {
    std::string image_id;
    PixelBox box;
    double confidence = 0.0;
    std::optional<MorphologyClass> predicted_class;  // may be "Healthy"
};

struct MatchConfig {
    double iou_threshold = 0.5;
    double confidence_threshold = 0.0;
};

/// Ground-truth fracture used for matching.
struct GroundTruth {
    PixelBox box;
    MorphologyClass morphology;
};

enum class Provenance { Matched, FalsePositive, FalseNegative };

std::string_view to_string(Provenance p);

/// One row of the evaluation. An empty predicted_class means the fracture
/// was MISSED by the detector; it counts against the true class's recall but
/// is not a predicted class.
struct EvalInstance {
    std::string image_id;
    MorphologyClass true_class;
    std::optional<MorphologyClass> predicted_class;
    Provenance provenance = Provenance::Matched;

    bool missed() const noexcept { return !predicted_class.has_value(); }
    friend bool operator==(const EvalInstance&, const EvalInstance&) = default;
};

/// Keeps predictions with confidence >= t, preserving order.
std::vector<Prediction> filter_by_confidence(std::span<const Prediction> preds, double t);

/// Class-agnostic greedy assignment. Predictions are visited by descending
/// confidence, ties by descending best IoU against any GT, then input order.
/// Each takes the unmatched GT with the highest IoU >= iou_threshold (ties to
/// the lower GT index). Returns, per prediction, the matched GT index.
std::vector<std::optional<std::size_t>> greedy_match(std::span<const PixelBox> gt, std::span<const PixelBox> preds,
                                                     std::span<const double> confidences, double iou_threshold);

/// Matches one image. Output: one instance per GT in GT order (matched or
/// false negative), then one false positive per unmatched prediction in
/// input order. Every prediction must carry a predicted class.
std::vector<EvalInstance> match_predictions(const std::string& image_id, std::span<const GroundTruth> gt,
                                            std::span<const Prediction> preds, const MatchConfig& cfg);

/// Runs the confidence filter and per-image matching over a whole set.
///
/// `known_images` is the universe of valid image ids (predictions on other
/// ids raise UnknownImageId). Without fp_reduction a "Healthy" prediction is
/// a SchemaError. Images are visited in sorted id order.
std::vector<EvalInstance> build_eval_set(std::span<const PatchLabel> patches, std::span<const Prediction> predictions,
                                         const std::set<std::string>& known_images, const MatchConfig& cfg,
                                         bool fp_reduction);

/// Parses `image_id,x0,y0,x1,y1,confidence[,predicted_class]`.
std::vector<Prediction> parse_prediction_file(std::string_view content, const std::string& source = "<memory>");
std::vector<Prediction> load_prediction_file(const std::filesystem::path& path);

/// Fills predicted classes from an `index,predicted_class` file keyed on the
/// 0-based row index of the prediction file.
void attach_classes(std::vector<Prediction>& preds, std::string_view content, const std::string& source = "<memory>");

/// Writes the predicted_class column only when every prediction has one.
std::string render_prediction_file(std::span<const Prediction> preds);

}  // namespace fracmorph
