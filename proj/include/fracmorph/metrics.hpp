#pragma once

#include "fracmorph/assignment.hpp"
#include "fracmorph/detection_eval.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fracmorph {

/// Counts of (true class, predicted class) pairs. Rows are the configured
/// classes followed by "Healthy"; columns are the same plus a final MISSED
/// column that only false negatives land in.
class ConfusionTally {
public:
    /// `classes` must not contain "Healthy"; it is appended automatically.
    explicit ConfusionTally(std::vector<MorphologyClass> classes);

    const std::vector<MorphologyClass>& classes() const noexcept { return classes_; }
    std::size_t missed_column() const noexcept { return classes_.size(); }

    /// Throws UnknownClass for names outside the class list.
    std::size_t index_of(std::string_view name) const;

    void add(const EvalInstance& instance);
    void add(std::size_t true_index, std::optional<std::size_t> predicted_index, std::size_t count = 1);

    std::size_t cell(std::size_t true_index, std::size_t predicted_index) const;
    std::size_t missed(std::size_t true_index) const { return cell(true_index, missed_column()); }

    std::size_t tp(std::size_t c) const { return cell(c, c); }
    /// Predictions of c whose true class differs (MISSED is never a prediction).
    std::size_t fp(std::size_t c) const;
    /// Instances of c not predicted as c, MISSED included.
    std::size_t fn(std::size_t c) const;
    std::size_t row_total(std::size_t c) const;
    std::size_t total() const;

    friend bool operator==(const ConfusionTally&, const ConfusionTally&) = default;

private:
    std::vector<MorphologyClass> classes_;
    std::vector<std::size_t> cells_;  // rows x (rows + 1)
};

/// Throws UnknownClass when an instance uses a class outside `classes` ∪ {Healthy}.
ConfusionTally confusion_from_instances(std::span<const EvalInstance> instances,
                                        const std::vector<MorphologyClass>& classes);

struct ClassMetrics {
    MorphologyClass name;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    double accuracy = 0;  // multilabel: (TP+TN)/N; multiclass: equals recall
    std::size_t support = 0;
};

struct MetricReport {
    double accuracy = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::vector<ClassMetrics> per_class;  // the averaged subset, in order

    std::size_t instances = 0;
    std::size_t matched = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;

    std::optional<double> confidence_threshold;
    std::optional<double> iou_threshold;
    bool fp_reduction = false;
};

/// 2PR/(P+R), or 0 when P+R is 0.
double f1_score(double precision, double recall) noexcept;

/// Macro-averaged metrics over `averaged_over` (a non-empty subset of the
/// tally's classes). 0/0 ratios count as 0. Accuracy is balanced accuracy,
/// i.e. the macro recall.
MetricReport macro_metrics(const ConfusionTally& tally, const std::vector<MorphologyClass>& averaged_over);

/// Per-class binary counts over images; accuracy includes true negatives.
/// Images absent from `predicted` count as predicting the empty set;
/// predictions for images without a target are ignored.
MetricReport multilabel_metrics(std::span<const MultilabelTarget> targets,
                                const std::map<std::string, std::set<MorphologyClass>>& predicted,
                                const std::vector<MorphologyClass>& classes);

struct EvalOptions {
    MatchConfig match;
    std::vector<MorphologyClass> classes;  // configured classes, no "Healthy"
    bool include_healthy = false;          // average over Healthy too
};

/// build_eval_set + confusion + macro metrics.
MetricReport evaluate(std::span<const PatchLabel> patches, std::span<const Prediction> predictions,
                      const std::set<std::string>& known_images, const EvalOptions& options, bool fp_reduction);

struct PredictionSource {
    bool fp_reduction = false;
    std::vector<Prediction> predictions;
};

/// One report per (source, threshold), sources in the given order; each
/// report echoes its threshold and fp_reduction setting. Thresholds must be
/// ascending (Error otherwise).
std::vector<MetricReport> sweep(std::span<const PatchLabel> patches, std::span<const PredictionSource> sources,
                                const std::set<std::string>& known_images, std::span<const double> thresholds,
                                const EvalOptions& options);

/// The six detector confidence levels studied for the patch classifier.
inline constexpr double kDefaultThresholds[] = {0.01, 0.05, 0.1, 0.5, 0.8, 0.85};

/// `t,fp_reduction,accuracy,f1,precision,recall`; t is empty when the report
/// has no confidence threshold (multilabel).
std::string render_metrics_csv(std::span<const MetricReport> reports);
/// `t,fp_reduction,class,precision,recall,f1,accuracy,support`
std::string render_per_class_csv(std::span<const MetricReport> reports);
/// Aligned text table for terminals.
std::string render_metrics_table(std::span<const MetricReport> reports);

}  // namespace fracmorph
