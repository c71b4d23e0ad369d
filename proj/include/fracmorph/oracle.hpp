#pragma once

#include "fracmorph/assignment.hpp"
#include "fracmorph/detection_eval.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fracmorph {

enum class OracleMode { Perfect, DropK, Jitter, Spurious };

std::optional<OracleMode> parse_oracle_mode(std::string_view name);

/// Synthetic predictor settings. Stands in for a trained detector +
/// classifier so evaluation can be exercised end to end.
struct OracleOptions {
    OracleMode mode = OracleMode::Perfect;
    std::optional<std::size_t> k;        // drop-k: nullopt drops all
    std::optional<MorphologyClass> drop_class;
    double sigma = 0.0;                  // jitter: corner noise in pixels
    std::size_t n = 0;                   // spurious: boxes per image
    MorphologyClass spurious_class;      // class given to spurious boxes
    double spurious_confidence = 0.5;
    std::uint64_t seed = 0;
};

/// Builds predictions from GT patches.
///  - perfect: every GT box, confidence 1, its GT class
///  - drop-k: perfect minus the first k patches (manifest order) of
///    drop_class, or of all patches when no class is given
///  - jitter: each corner moved by N(0, sigma), confidence U(0,1)
///  - spurious: perfect plus n boxes per image in `image_sizes` that do not
///    overlap any GT box or each other (IoU 0)
/// Throws Error when spurious boxes cannot be placed.
std::vector<Prediction> make_oracle_predictions(const std::vector<PatchLabel>& patches,
                                                const std::map<std::string, ImageSize>& image_sizes,
                                                const OracleOptions& options);

/// Multilabel counterpart: perfect copies the targets, drop-k empties the
/// first k images that have any label (all when k is nullopt).
std::vector<MultilabelTarget> make_oracle_multilabel(const std::vector<MultilabelTarget>& targets,
                                                     const OracleOptions& options);

}  // namespace fracmorph
