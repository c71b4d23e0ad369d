#include "fracmorph/metrics.hpp"

#include "fracmorph/errors.hpp"
#include "fracmorph/text.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace fracmorph {

ConfusionTally::ConfusionTally(std::vector<MorphologyClass> classes) : classes_(std::move(classes)) {
    if (std::find(classes_.begin(), classes_.end(), kHealthy) != classes_.end()) {
        throw Error("class list must not contain 'Healthy'");
    }
    classes_.emplace_back(kHealthy);
    cells_.assign(classes_.size() * (classes_.size() + 1), 0);
}

std::size_t ConfusionTally::index_of(std::string_view name) const {
    const auto it = std::find(classes_.begin(), classes_.end(), name);
    if (it == classes_.end()) throw UnknownClass(std::string(name));
    return static_cast<std::size_t>(it - classes_.begin());
}

void ConfusionTally::add(std::size_t true_index, std::optional<std::size_t> predicted_index, std::size_t count) {
    const auto col = predicted_index.value_or(missed_column());
    if (true_index >= classes_.size() || col > missed_column()) {
        throw InvariantViolation("ConfusionTally::add: index out of range");
    }
    cells_[true_index * (classes_.size() + 1) + col] += count;
}

void ConfusionTally::add(const EvalInstance& instance) {
    const auto t = index_of(instance.true_class);
    std::optional<std::size_t> p;
    if (instance.predicted_class) p = index_of(*instance.predicted_class);
    add(t, p);
}

std::size_t ConfusionTally::cell(std::size_t true_index, std::size_t predicted_index) const {
    return cells_.at(true_index * (classes_.size() + 1) + predicted_index);
}

std::size_t ConfusionTally::fp(std::size_t c) const {
    std::size_t n = 0;
    for (std::size_t r = 0; r < classes_.size(); ++r) {
        if (r != c) n += cell(r, c);
    }
    return n;
}

std::size_t ConfusionTally::row_total(std::size_t c) const {
    std::size_t n = 0;
    for (std::size_t col = 0; col <= missed_column(); ++col) n += cell(c, col);
    return n;
}

std::size_t ConfusionTally::fn(std::size_t c) const { return row_total(c) - tp(c); }

std::size_t ConfusionTally::total() const { return std::accumulate(cells_.begin(), cells_.end(), std::size_t{0}); }

ConfusionTally confusion_from_instances(std::span<const EvalInstance> instances,
                                        const std::vector<MorphologyClass>& classes) {
    ConfusionTally tally(classes);
    for (const auto& inst : instances) tally.add(inst);
    return tally;
}

double f1_score(double precision, double recall) noexcept {
    const double s = precision + recall;
    return s > 0 ? 2.0 * precision * recall / s : 0.0;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void average(MetricReport& r) {
    const double n = static_cast<double>(r.per_class.size());
    r.accuracy = r.precision = r.recall = r.f1 = 0.0;
    for (const auto& c : r.per_class) {
        r.accuracy += c.accuracy;
        r.precision += c.precision;
        r.recall += c.recall;
        r.f1 += c.f1;
    }
    r.accuracy /= n;
    r.precision /= n;
    r.recall /= n;
    r.f1 /= n;
}

}  // namespace

MetricReport macro_metrics(const ConfusionTally& tally, const std::vector<MorphologyClass>& averaged_over) {
    if (averaged_over.empty()) throw Error("macro_metrics: empty class subset");
    MetricReport report;
    for (const auto& name : averaged_over) {
        const auto c = tally.index_of(name);
        ClassMetrics m;
        m.name = name;
        m.support = tally.row_total(c);
        m.precision = ratio(tally.tp(c), tally.tp(c) + tally.fp(c));
        m.recall = ratio(tally.tp(c), tally.tp(c) + tally.fn(c));
        m.f1 = f1_score(m.precision, m.recall);
        m.accuracy = m.recall;
        report.per_class.push_back(std::move(m));
    }
    average(report);
    report.instances = tally.total();
    return report;
}

MetricReport multilabel_metrics(std::span<const MultilabelTarget> targets,
                                const std::map<std::string, std::set<MorphologyClass>>& predicted,
                                const std::vector<MorphologyClass>& classes) {
    if (classes.empty()) throw Error("multilabel_metrics: empty class set");
    const std::set<MorphologyClass> known(classes.begin(), classes.end());
    for (const auto& t : targets) {
        for (const auto& c : t.present) {
            if (!known.count(c)) throw UnknownClass(c);
        }
    }
    for (const auto& [id, set] : predicted) {
        for (const auto& c : set) {
            if (!known.count(c)) throw UnknownClass(c);
        }
    }

    static const std::set<MorphologyClass> kEmpty;
    MetricReport report;
    const std::size_t n = targets.size();
    for (const auto& name : classes) {
        std::size_t tp = 0, fp = 0, fn = 0;
        for (const auto& t : targets) {
            const auto it = predicted.find(t.image_id);
            const auto& pred = it == predicted.end() ? kEmpty : it->second;
            const bool truth = t.present.count(name) > 0;
            const bool guess = pred.count(name) > 0;
            tp += truth && guess;
            fp += !truth && guess;
            fn += truth && !guess;
        }
        const std::size_t tn = n - tp - fp - fn;
        ClassMetrics m;
        m.name = name;
        m.support = tp + fn;
        m.precision = ratio(tp, tp + fp);
        m.recall = ratio(tp, tp + fn);
        m.f1 = f1_score(m.precision, m.recall);
        m.accuracy = ratio(tp + tn, n);
        report.per_class.push_back(std::move(m));
    }
    average(report);
    report.instances = n;
    return report;
}

MetricReport evaluate(std::span<const PatchLabel> patches, std::span<const Prediction> predictions,
                      const std::set<std::string>& known_images, const EvalOptions& options, bool fp_reduction) {
    const auto instances = build_eval_set(patches, predictions, known_images, options.match, fp_reduction);
    const auto tally = confusion_from_instances(instances, options.classes);

    auto averaged = options.classes;
    if (options.include_healthy) averaged.emplace_back(kHealthy);
    auto report = macro_metrics(tally, averaged);

    for (const auto& i : instances) {
        switch (i.provenance) {
            case Provenance::Matched: ++report.matched; break;
            case Provenance::FalsePositive: ++report.false_positives; break;
            case Provenance::FalseNegative: ++report.false_negatives; break;
        }
    }
    report.confidence_threshold = options.match.confidence_threshold;
    report.iou_threshold = options.match.iou_threshold;
    report.fp_reduction = fp_reduction;
    return report;
}

std::vector<MetricReport> sweep(std::span<const PatchLabel> patches, std::span<const PredictionSource> sources,
                                const std::set<std::string>& known_images, std::span<const double> thresholds,
                                const EvalOptions& options) {
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
        throw Error("sweep thresholds must be ascending");
    }
    std::vector<MetricReport> rows;
    for (const auto& source : sources) {
        for (const double t : thresholds) {
            auto opts = options;
            opts.match.confidence_threshold = t;
            rows.push_back(evaluate(patches, source.predictions, known_images, opts, source.fp_reduction));
        }
    }
    return rows;
}

namespace {

std::string threshold_text(const MetricReport& r) {
    return r.confidence_threshold ? format_double(*r.confidence_threshold) : std::string();
}

}  // namespace

std::string render_metrics_csv(std::span<const MetricReport> reports) {
    std::string out = "t,fp_reduction,accuracy,f1,precision,recall\n";
    for (const auto& r : reports) {
        out += join_record({threshold_text(r), r.fp_reduction ? "1" : "0", format_double(r.accuracy),
                            format_double(r.f1), format_double(r.precision), format_double(r.recall)},
                           ',');
        out += '\n';
    }
    return out;
}

std::string render_per_class_csv(std::span<const MetricReport> reports) {
    std::string out = "t,fp_reduction,class,precision,recall,f1,accuracy,support\n";
    for (const auto& r : reports) {
        for (const auto& c : r.per_class) {
            out += join_record({threshold_text(r), r.fp_reduction ? "1" : "0", c.name, format_double(c.precision),
                                format_double(c.recall), format_double(c.f1), format_double(c.accuracy),
                                std::to_string(c.support)},
                               ',');
            out += '\n';
        }
    }
    return out;
}

std::string render_metrics_table(std::span<const MetricReport> reports) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-6s %-4s %9s %9s %9s %9s %8s %8s %8s\n", "t", "fp", "accuracy", "f1",
                  "precision", "recall", "matched", "fp_inst", "missed");
    out += line;
    for (const auto& r : reports) {
        const auto t = threshold_text(r);
        std::snprintf(line, sizeof line, "%-6s %-4s %9.4f %9.4f %9.4f %9.4f %8zu %8zu %8zu\n",
                      t.empty() ? "-" : t.c_str(), r.fp_reduction ? "yes" : "no", r.accuracy, r.f1, r.precision,
                      r.recall, r.matched, r.false_positives, r.false_negatives);
        out += line;
    }
    return out;
}

}  // namespace fracmorph
