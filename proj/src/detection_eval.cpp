#include "fracmorph/detection_eval.hpp"

#include "fracmorph/errors.hpp"
#include "fracmorph/text.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace fracmorph {

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::Matched: return "matched";
        case Provenance::FalsePositive: return "false_positive";
        case Provenance::FalseNegative: return "false_negative";
    }
    return "matched";
}

std::vector<Prediction> filter_by_confidence(std::span<const Prediction> preds, double t) {
    std::vector<Prediction> out;
    std::copy_if(preds.begin(), preds.end(), std::back_inserter(out),
                 [t](const Prediction& p) { return p.confidence >= t; });
    return out;
}

std::vector<std::optional<std::size_t>> greedy_match(std::span<const PixelBox> gt, std::span<const PixelBox> preds,
                                                     std::span<const double> confidences, double iou_threshold) {
    const std::size_t n = preds.size();
    std::vector<std::vector<double>> overlap(n, std::vector<double>(gt.size()));
    std::vector<double> best(n, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t g = 0; g < gt.size(); ++g) {
            overlap[p][g] = iou(preds[p], gt[g]);
            best[p] = std::max(best[p], overlap[p][g]);
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (confidences[a] != confidences[b]) return confidences[a] > confidences[b];
        return best[a] > best[b];
    });

    std::vector<bool> taken(gt.size(), false);
    std::vector<std::optional<std::size_t>> match(n);
    for (const auto p : order) {
        std::optional<std::size_t> pick;
        for (std::size_t g = 0; g < gt.size(); ++g) {
            if (taken[g] || overlap[p][g] < iou_threshold) continue;
            if (!pick || overlap[p][g] > overlap[p][*pick]) pick = g;
        }
        if (pick) {
            taken[*pick] = true;
            match[p] = pick;
        }
    }
    return match;
}

std::vector<EvalInstance> match_predictions(const std::string& image_id, std::span<const GroundTruth> gt,
                                            std::span<const Prediction> preds, const MatchConfig& cfg) {
    std::vector<PixelBox> gt_boxes;
    gt_boxes.reserve(gt.size());
    for (const auto& g : gt) gt_boxes.push_back(g.box);
    std::vector<PixelBox> pred_boxes;
    std::vector<double> conf;
    for (const auto& p : preds) {
        if (!p.predicted_class) {
            throw SchemaError("prediction on " + p.image_id + " has no predicted class");
        }
        pred_boxes.push_back(p.box);
        conf.push_back(p.confidence);
    }

    const auto match = greedy_match(gt_boxes, pred_boxes, conf, cfg.iou_threshold);
    std::vector<std::optional<std::size_t>> gt_to_pred(gt.size());
    for (std::size_t p = 0; p < match.size(); ++p) {
        if (match[p]) gt_to_pred[*match[p]] = p;
    }

    std::vector<EvalInstance> out;
    out.reserve(gt.size() + preds.size());
    for (std::size_t g = 0; g < gt.size(); ++g) {
        if (const auto p = gt_to_pred[g]) {
            out.push_back({image_id, gt[g].morphology, preds[*p].predicted_class, Provenance::Matched});
        } else {
            out.push_back({image_id, gt[g].morphology, std::nullopt, Provenance::FalseNegative});
        }
    }
    for (std::size_t p = 0; p < preds.size(); ++p) {
        if (!match[p]) {
            out.push_back({image_id, std::string(kHealthy), preds[p].predicted_class, Provenance::FalsePositive});
        }
    }
    return out;
}

std::vector<EvalInstance> build_eval_set(std::span<const PatchLabel> patches, std::span<const Prediction> predictions,
                                         const std::set<std::string>& known_images, const MatchConfig& cfg,
                                         bool fp_reduction) {
    std::map<std::string, std::vector<GroundTruth>> gt;
    for (const auto& p : patches) {
        if (!known_images.count(p.image_id)) throw UnknownImageId(p.image_id);
        gt[p.image_id].push_back({p.box_rect.as_box(), p.morphology});
    }
    std::map<std::string, std::vector<Prediction>> preds;
    for (const auto& p : predictions) {
        if (!known_images.count(p.image_id)) throw UnknownImageId(p.image_id);
        if (!p.predicted_class) throw SchemaError("prediction on " + p.image_id + " has no predicted class");
        if (!fp_reduction && *p.predicted_class == kHealthy) {
            throw SchemaError("prediction on " + p.image_id +
                              " is 'Healthy' but the classifier has no Healthy class without FP-reduction");
        }
        if (p.confidence >= cfg.confidence_threshold) preds[p.image_id].push_back(p);
    }

    std::set<std::string> ids;
    for (const auto& [id, _] : gt) ids.insert(id);
    for (const auto& [id, _] : preds) ids.insert(id);

    std::vector<EvalInstance> out;
    static const std::vector<GroundTruth> kNoGt;
    static const std::vector<Prediction> kNoPreds;
    for (const auto& id : ids) {
        const auto git = gt.find(id);
        const auto pit = preds.find(id);
        auto rows = match_predictions(id, git == gt.end() ? kNoGt : git->second,
                                      pit == preds.end() ? kNoPreds : pit->second, cfg);
        out.insert(out.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
    }
    return out;
}

std::vector<Prediction> parse_prediction_file(std::string_view content, const std::string& source) {
    const auto table = Table::parse(content, ',', source);
    const std::size_t cols[6] = {table.require_column("image_id"), table.require_column("x0"),
                                 table.require_column("y0"),       table.require_column("x1"),
                                 table.require_column("y1"),       table.require_column("confidence")};
    const auto cls_col = table.column("predicted_class");

    std::vector<Prediction> out;
    out.reserve(table.rows());
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto& row = table.row(i);
        const auto where = source + ":" + std::to_string(table.line_of(i));
        Prediction p;
        p.image_id = row[cols[0]];
        double v[5];
        for (int k = 0; k < 5; ++k) {
            const auto d = parse_double(row[cols[k + 1]]);
            if (!d) throw SchemaError(where + ": non-numeric field '" + row[cols[k + 1]] + "'");
            v[k] = *d;
        }
        p.box = {v[0], v[1], v[2], v[3]};
        if (p.box.x1 < p.box.x0 || p.box.y1 < p.box.y0) throw SchemaError(where + ": inverted box");
        p.confidence = v[4];
        if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) throw SchemaError(where + ": confidence outside [0,1]");
        if (cls_col && !row[*cls_col].empty()) p.predicted_class = row[*cls_col];
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Prediction> load_prediction_file(const std::filesystem::path& path) {
    return parse_prediction_file(read_file(path), path.string());
}

void attach_classes(std::vector<Prediction>& preds, std::string_view content, const std::string& source) {
    const auto table = Table::parse(content, ',', source);
    const auto idx_col = table.require_column("index");
    const auto cls_col = table.require_column("predicted_class");
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto& row = table.row(i);
        const auto idx = parse_int(row[idx_col]);
        if (!idx || *idx < 0 || static_cast<std::size_t>(*idx) >= preds.size()) {
            throw SchemaError(source + ":" + std::to_string(table.line_of(i)) + ": prediction index '" + row[idx_col] +
                              "' out of range");
        }
        preds[static_cast<std::size_t>(*idx)].predicted_class = row[cls_col];
    }
}

std::string render_prediction_file(std::span<const Prediction> preds) {
    const bool with_class =
        std::all_of(preds.begin(), preds.end(), [](const Prediction& p) { return p.predicted_class.has_value(); });
    std::string out = with_class ? "image_id,x0,y0,x1,y1,confidence,predicted_class\n" : "image_id,x0,y0,x1,y1,confidence\n";
    for (const auto& p : preds) {
        std::vector<std::string> fields{p.image_id,          format_double(p.box.x0), format_double(p.box.y0),
                                        format_double(p.box.x1), format_double(p.box.y1), format_double(p.confidence)};
        if (with_class) fields.push_back(*p.predicted_class);
        out += join_record(fields, ',');
        out += '\n';
    }
    return out;
}

}  // namespace fracmorph
