#pragma once

#include "fracmorph/dataset.hpp"
#include "fracmorph/metrics.hpp"
#include "fracmorph/oracle.hpp"
#include "fracmorph/raster.hpp"
#include "fracmorph/split.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fracmorph::cli {

/// Everything a subcommand needs, read from one JSON file. Relative paths
/// resolve against the config file's directory.
struct PipelineConfig {
    DatasetLayout dataset;
    std::filesystem::path mapping_table;
    MaskLegend mask_legend = MaskLegend::default_legend();
    std::size_t min_count = 0;
    SplitRatios split_ratios{8, 1, 1};
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> split_manifest;  // default: <output_dir>/split_manifest.tsv
    PatchSpec patch;
    double crop_margin = 0.0;
    bool export_patches = false;
    MatchConfig match;
    std::vector<double> thresholds{std::begin(kDefaultThresholds), std::end(kDefaultThresholds)};
    bool include_healthy = false;
    std::filesystem::path output_dir = "out";

    std::filesystem::path split_manifest_path() const {
        return split_manifest ? *split_manifest : output_dir / "split_manifest.tsv";
    }
    std::filesystem::path patch_manifest_path() const { return output_dir / "patches.csv"; }
    std::filesystem::path multilabel_path() const { return output_dir / "multilabel_targets.csv"; }
    std::filesystem::path classes_path() const { return output_dir / "classes.txt"; }

    /// Throws ConfigError on invalid values.
    void validate() const;
};

PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

/// JSON echo of the effective configuration, written next to outputs.
std::string config_json(const PipelineConfig& config);

struct SplitOutcome {
    std::filesystem::path manifest;
    std::array<std::size_t, 3> sizes{};
    std::size_t rejected = 0;
};

SplitOutcome cmd_split(const PipelineConfig& config, std::ostream& log);

struct ExtractOutcome {
    std::filesystem::path manifest;
    std::size_t patches = 0;
    std::vector<MorphologyClass> retained_classes;
    std::map<DiagnosticKind, std::size_t> diagnostics;
    std::size_t rejected = 0;
};

ExtractOutcome cmd_extract(const PipelineConfig& config, std::ostream& log);

struct EvalRequest {
    std::filesystem::path predictions;
    std::optional<std::filesystem::path> classes_file;  // index,predicted_class
    bool gt_boxes = false;
    bool fp_reduction = false;
    bool multilabel = false;
    std::optional<double> threshold;
    std::optional<Split> split;
};

MetricReport cmd_eval(const PipelineConfig& config, const EvalRequest& request, std::ostream& log);

struct SweepRequest {
    std::filesystem::path predictions;
    std::optional<std::filesystem::path> classes_file;
    std::optional<std::filesystem::path> fp_predictions;  // classifier with a Healthy class
    std::optional<std::filesystem::path> fp_classes_file;
    bool fp_reduction = false;  // treat `predictions` itself as FP-reduction output
    std::optional<std::vector<double>> thresholds;
    std::optional<Split> split;
};

std::vector<MetricReport> cmd_sweep(const PipelineConfig& config, const SweepRequest& request, std::ostream& log);

struct OracleRequest {
    OracleOptions options;
    bool fp_reduction = false;  // spurious boxes default to "Healthy"
    bool multilabel = false;
    std::optional<Split> split;
    std::optional<std::filesystem::path> output;
};

std::filesystem::path cmd_make_oracle(const PipelineConfig& config, const OracleRequest& request, std::ostream& log);

/// Parses arguments and dispatches. Exit codes: 0 success, 1 input error,
/// 2 internal invariant violation.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fracmorph::cli
