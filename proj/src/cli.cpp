#include "fracmorph/cli.hpp"

#include "fracmorph/errors.hpp"
#include "fracmorph/text.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <ostream>
#include <set>

namespace fracmorph::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown config key '" + where + key + "'");
        }
    }
}

std::string_view mask_class_name(MaskClass c) {
    switch (c) {
        case MaskClass::Background: return "background";
        case MaskClass::Radius: return "radius";
        case MaskClass::Ulna: return "ulna";
        case MaskClass::RadiusEpiphysis: return "radius-epiphysis";
        case MaskClass::UlnaEpiphysis: return "ulna-epiphysis";
    }
    return "background";
}

}  // namespace

void PipelineConfig::validate() const {
    if (!(split_ratios[0] > 0 && split_ratios[1] > 0 && split_ratios[2] > 0)) {
        throw ConfigError("split ratios must be positive");
    }
    if (!(match.iou_threshold > 0.0 && match.iou_threshold <= 1.0)) {
        throw ConfigError("iou_threshold must lie in (0,1]");
    }
    for (double t : thresholds) {
        if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("thresholds must lie in [0,1]");
    }
    if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
        throw ConfigError("thresholds must be ascending");
    }
    if (patch.width <= 0 || patch.height <= 0) throw ConfigError("patch size must be positive");
    if (!(crop_margin >= 0.0)) throw ConfigError("crop margin must be non-negative");
}

PipelineConfig parse_config(std::string_view json_text, const fs::path& base_dir) {
    PipelineConfig cfg;
    try {
        const auto j = json::parse(json_text);
        if (!j.is_object()) throw ConfigError("config must be a JSON object");
        reject_unknown_keys(j,
                            {"dataset", "mapping_table", "mask_legend", "min_count", "split", "patch", "match",
                             "thresholds", "include_healthy", "output_dir"},
                            "");

        if (!j.contains("dataset")) throw ConfigError("config requires 'dataset'");
        const auto& d = j.at("dataset");
        reject_unknown_keys(d, {"root", "metadata_file", "labels_dir", "masks_dir", "images_dir", "fracture_class"},
                            "dataset.");
        cfg.dataset.root = resolve(base_dir, d.at("root").get<std::string>());
        cfg.dataset.metadata_file = d.value("metadata_file", cfg.dataset.metadata_file);
        cfg.dataset.labels_dir = d.value("labels_dir", cfg.dataset.labels_dir);
        cfg.dataset.masks_dir = d.value("masks_dir", cfg.dataset.masks_dir);
        cfg.dataset.images_dir = d.value("images_dir", cfg.dataset.images_dir);
        cfg.dataset.fracture_class = d.value("fracture_class", cfg.dataset.fracture_class);

        if (!j.contains("mapping_table")) throw ConfigError("config requires 'mapping_table'");
        cfg.mapping_table = resolve(base_dir, j.at("mapping_table").get<std::string>());

        if (j.contains("mask_legend")) {
            std::map<int, MaskClass> legend;
            for (const auto& [key, value] : j.at("mask_legend").items()) {
                const auto idx = parse_int(key);
                const auto cls = parse_mask_class(value.get<std::string>());
                if (!idx || *idx < 0 || *idx > 255) throw ConfigError("mask_legend key '" + key + "' is not 0..255");
                if (!cls) throw ConfigError("mask_legend: unknown class '" + value.get<std::string>() + "'");
                legend.emplace(static_cast<int>(*idx), *cls);
            }
            cfg.mask_legend = MaskLegend(std::move(legend));
        }

        const auto min_count = j.value("min_count", 0LL);
        if (min_count < 0) throw ConfigError("min_count must be non-negative");
        cfg.min_count = static_cast<std::size_t>(min_count);

        if (j.contains("split")) {
            const auto& s = j.at("split");
            reject_unknown_keys(s, {"ratios", "seed", "manifest"}, "split.");
            if (s.contains("ratios")) {
                const auto r = s.at("ratios").get<std::vector<double>>();
                if (r.size() != 3) throw ConfigError("split.ratios needs three values");
                cfg.split_ratios = {r[0], r[1], r[2]};
            }
            cfg.seed = s.value("seed", cfg.seed);
            if (s.contains("manifest")) cfg.split_manifest = resolve(base_dir, s.at("manifest").get<std::string>());
        }

        if (j.contains("patch")) {
            const auto& p = j.at("patch");
            reject_unknown_keys(p, {"width", "height", "margin", "export"}, "patch.");
            cfg.patch.width = p.value("width", cfg.patch.width);
            cfg.patch.height = p.value("height", cfg.patch.height);
            cfg.crop_margin = p.value("margin", cfg.crop_margin);
            cfg.export_patches = p.value("export", cfg.export_patches);
        }

        if (j.contains("match")) {
            const auto& m = j.at("match");
            reject_unknown_keys(m, {"iou_threshold"}, "match.");
            cfg.match.iou_threshold = m.value("iou_threshold", cfg.match.iou_threshold);
        }

        if (j.contains("thresholds")) cfg.thresholds = j.at("thresholds").get<std::vector<double>>();
        cfg.include_healthy = j.value("include_healthy", cfg.include_healthy);
        cfg.output_dir = resolve(base_dir, j.value("output_dir", std::string("out")));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const fs::path& path) {
    return parse_config(read_file(path), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

std::string config_json(const PipelineConfig& c) {
    json legend = json::object();
    for (const auto& [idx, cls] : c.mask_legend.entries()) legend[std::to_string(idx)] = mask_class_name(cls);
    json j = {
        {"dataset",
         {{"root", c.dataset.root.string()},
          {"metadata_file", c.dataset.metadata_file},
          {"labels_dir", c.dataset.labels_dir},
          {"masks_dir", c.dataset.masks_dir},
          {"images_dir", c.dataset.images_dir},
          {"fracture_class", c.dataset.fracture_class}}},
        {"mapping_table", c.mapping_table.string()},
        {"mask_legend", legend},
        {"min_count", c.min_count},
        {"split",
         {{"ratios", {c.split_ratios[0], c.split_ratios[1], c.split_ratios[2]}},
          {"seed", c.seed},
          {"manifest", c.split_manifest_path().string()}}},
        {"patch", {{"width", c.patch.width}, {"height", c.patch.height}, {"margin", c.crop_margin}, {"export", c.export_patches}}},
        {"match", {{"iou_threshold", c.match.iou_threshold}}},
        {"thresholds", c.thresholds},
        {"include_healthy", c.include_healthy},
        {"output_dir", c.output_dir.string()},
    };
    return j.dump(2) + "\n";
}

namespace {

void write_output(const fs::path& path, std::string_view content, const PipelineConfig& config,
                  const json& invocation) {
    write_file_atomic(path, content);
    json echo = {{"output", path.filename().string()}, {"invocation", invocation}, {"config", json::parse(config_json(config))}};
    auto sidecar = path;
    sidecar += ".config.json";
    write_file_atomic(sidecar, echo.dump(2) + "\n");
}

std::vector<MorphologyClass> read_classes(const PipelineConfig& config) {
    std::vector<MorphologyClass> classes;
    for (const auto& line : split(read_file(config.classes_path()), '\n')) {
        auto name = trim(line);
        if (!name.empty() && name.front() != '#') classes.push_back(std::move(name));
    }
    if (classes.empty()) {
        throw Error(config.classes_path().string() + " lists no classes; run extract on a dataset with mapped fractures");
    }
    return classes;
}

std::set<std::string> split_ids(const PipelineConfig& config, Split split) {
    const auto manifest = load_split_manifest(config.split_manifest_path());
    std::set<std::string> ids;
    for (const auto& [id, s] : manifest) {
        if (s == split) ids.insert(id);
    }
    return ids;
}

void log_rejects(const std::vector<RecordError>& rejected, std::ostream& log) {
    for (const auto& r : rejected) {
        log << "rejected line " << r.line << " (" << r.image_id << "): " << r.message << "\n";
    }
}

std::string split_name(const std::optional<Split>& s) { return s ? std::string(to_string(*s)) : "all"; }

}  // namespace

SplitOutcome cmd_split(const PipelineConfig& config, std::ostream& log) {
    const auto mapping = MappingTable::load(config.mapping_table);
    const auto loaded = load_dataset(config.dataset);
    log_rejects(loaded.rejected, log);

    std::vector<StratifyItem> items;
    std::vector<std::string> ids;
    for (const auto& rec : loaded.records) {
        items.push_back({rec.image_id, record_morphologies(rec, mapping)});
        ids.push_back(rec.image_id);
    }
    const auto assignment = stratified_split(items, config.split_ratios, config.seed);

    SplitOutcome outcome;
    outcome.manifest = config.split_manifest_path();
    outcome.rejected = loaded.rejected.size();
    for (const auto& [id, s] : assignment) ++outcome.sizes[static_cast<std::size_t>(s)];

    write_output(outcome.manifest, render_split_manifest(ids, assignment), config,
                 {{"command", "split"}, {"seed", config.seed}});
    log << "split " << items.size() << " images: train " << outcome.sizes[0] << ", val " << outcome.sizes[1]
        << ", test " << outcome.sizes[2] << " (" << outcome.rejected << " rejected) -> " << outcome.manifest.string()
        << "\n";
    return outcome;
}

ExtractOutcome cmd_extract(const PipelineConfig& config, std::ostream& log) {
    const auto mapping = MappingTable::load(config.mapping_table);
    auto loaded = load_dataset(config.dataset);
    log_rejects(loaded.rejected, log);

    const auto manifest_path = config.split_manifest_path();
    const bool have_split = fs::exists(manifest_path);
    if (have_split) {
        apply_split(loaded.records, load_split_manifest(manifest_path));
    } else {
        log << "no split manifest at " << manifest_path.string() << "; class counts use all images\n";
    }

    ExtractOptions options;
    options.min_count = config.min_count;
    options.crop_margin = config.crop_margin;
    const auto result = emit_patch_labels(loaded.records, mapping, file_mask_provider(config.mask_legend), options);

    const std::set<MorphologyClass> retained(result.retained_classes.begin(), result.retained_classes.end());
    const auto targets = build_multilabel_targets(loaded.records, mapping, retained);

    const json invocation = {{"command", "extract"}, {"split_manifest", have_split ? manifest_path.string() : ""}};
    write_output(config.patch_manifest_path(), render_patch_manifest(result.patches), config, invocation);
    write_file_atomic(config.output_dir / "diagnostics.tsv", render_diagnostics(result.diagnostics));
    write_output(config.multilabel_path(), render_multilabel_file(targets), config, invocation);

    std::string classes_text;
    for (const auto& c : result.retained_classes) classes_text += c + "\n";
    write_file_atomic(config.classes_path(), classes_text);

    std::map<std::string, std::size_t> weight_counts;
    for (const auto& c : result.retained_classes) {
        if (const auto n = result.class_counts.at(c); n > 0) weight_counts[c] = n;
    }
    std::string weights_text = "class,count,loss_weight,sample_weight\n";
    if (!weight_counts.empty()) {
        const auto w = inverse_frequency_weights(weight_counts);
        for (const auto& [c, n] : weight_counts) {
            weights_text += join_record({c, std::to_string(n), format_double(w.loss.at(c)), format_double(w.sample.at(c))}, ',') + "\n";
        }
    }
    write_file_atomic(config.output_dir / "class_weights.csv", weights_text);

    if (config.export_patches) {
        std::map<std::string, std::size_t> next_index;
        std::map<std::string, const ImageRecord*> by_id;
        for (const auto& r : loaded.records) by_id[r.image_id] = &r;
        for (const auto& p : result.patches) {
            const auto k = next_index[p.image_id]++;
            const auto image = read_gray_png(by_id.at(p.image_id)->image_path);
            const auto patch = crop_and_resize(image, p.crop_rect, config.patch);
            write_gray_png(config.output_dir / "patches" / (p.image_id + "_" + std::to_string(k) + ".png"), patch);
        }
    }

    ExtractOutcome outcome;
    outcome.manifest = config.patch_manifest_path();
    outcome.patches = result.patches.size();
    outcome.retained_classes = result.retained_classes;
    outcome.diagnostics = result.diagnostics.counts();
    outcome.rejected = loaded.rejected.size();

    log << "extracted " << outcome.patches << " patches from " << loaded.records.size() << " images ("
        << outcome.rejected << " rejected) -> " << outcome.manifest.string() << "\n";
    log << "classes:";
    for (const auto& c : result.retained_classes) log << " " << c << "=" << result.class_counts.at(c);
    log << "\n";
    for (const auto& c : result.excluded_classes) {
        log << "excluded class " << c << " (count " << result.class_counts.at(c) << " < " << config.min_count << ")\n";
    }
    for (const auto& [kind, n] : outcome.diagnostics) log << "diagnostic " << to_string(kind) << ": " << n << "\n";
    return outcome;
}

namespace {

std::vector<Prediction> load_predictions(const fs::path& path, const std::optional<fs::path>& classes_file) {
    auto preds = load_prediction_file(path);
    if (classes_file) attach_classes(preds, read_file(*classes_file), classes_file->string());
    return preds;
}

struct EvalScope {
    std::vector<PatchLabel> patches;
    std::set<std::string> known;
    std::optional<std::set<std::string>> restrict_to;
};

EvalScope eval_scope(const PipelineConfig& config, const std::optional<Split>& split) {
    EvalScope scope;
    const auto ids = load_image_ids(config.dataset);
    scope.known.insert(ids.begin(), ids.end());
    scope.patches = load_patch_manifest(config.patch_manifest_path());
    if (split) {
        scope.restrict_to = split_ids(config, *split);
        std::erase_if(scope.patches, [&](const PatchLabel& p) { return !scope.restrict_to->count(p.image_id); });
    }
    return scope;
}

std::vector<Prediction> scoped(std::vector<Prediction> preds, const EvalScope& scope) {
    for (const auto& p : preds) {
        if (!scope.known.count(p.image_id)) throw UnknownImageId(p.image_id);
    }
    if (scope.restrict_to) {
        std::erase_if(preds, [&](const Prediction& p) { return !scope.restrict_to->count(p.image_id); });
    }
    return preds;
}

}  // namespace

MetricReport cmd_eval(const PipelineConfig& config, const EvalRequest& request, std::ostream& log) {
    const auto classes = read_classes(config);
    const json invocation = {{"command", "eval"},
                             {"predictions", request.predictions.string()},
                             {"gt_boxes", request.gt_boxes},
                             {"fp_reduction", request.fp_reduction},
                             {"multilabel", request.multilabel},
                             {"split", split_name(request.split)}};

    MetricReport report;
    if (request.multilabel) {
        auto targets = load_multilabel_file(config.multilabel_path());
        if (request.split) {
            const auto ids = split_ids(config, *request.split);
            std::erase_if(targets, [&](const MultilabelTarget& t) { return !ids.count(t.image_id); });
        }
        const std::set<std::string> target_ids = [&] {
            std::set<std::string> s;
            for (const auto& t : targets) s.insert(t.image_id);
            return s;
        }();
        const auto ids = load_image_ids(config.dataset);
        const std::set<std::string> known(ids.begin(), ids.end());
        std::map<std::string, std::set<MorphologyClass>> predicted;
        for (auto& t : load_multilabel_file(request.predictions)) {
            if (!known.count(t.image_id)) throw UnknownImageId(t.image_id);
            if (target_ids.count(t.image_id)) predicted[t.image_id] = std::move(t.present);
        }
        report = multilabel_metrics(targets, predicted, classes);
    } else {
        const auto scope = eval_scope(config, request.split);
        const auto preds = scoped(load_predictions(request.predictions, request.classes_file), scope);
        EvalOptions options;
        options.classes = classes;
        options.include_healthy = config.include_healthy;
        options.match = config.match;
        options.match.confidence_threshold = request.gt_boxes ? 0.0 : request.threshold.value_or(0.0);
        report = evaluate(scope.patches, preds, scope.known, options, request.fp_reduction);
    }

    const std::vector<MetricReport> rows{report};
    write_output(config.output_dir / "eval_report.csv", render_metrics_csv(rows), config, invocation);
    write_output(config.output_dir / "eval_per_class.csv", render_per_class_csv(rows), config, invocation);
    log << render_metrics_table(rows);
    return report;
}

std::vector<MetricReport> cmd_sweep(const PipelineConfig& config, const SweepRequest& request, std::ostream& log) {
    const auto classes = read_classes(config);
    const auto scope = eval_scope(config, request.split);

    std::vector<PredictionSource> sources;
    sources.push_back({request.fp_reduction, scoped(load_predictions(request.predictions, request.classes_file), scope)});
    if (request.fp_predictions) {
        sources.push_back({true, scoped(load_predictions(*request.fp_predictions, request.fp_classes_file), scope)});
    }

    EvalOptions options;
    options.classes = classes;
    options.include_healthy = config.include_healthy;
    options.match = config.match;
    const auto thresholds = request.thresholds.value_or(config.thresholds);
    for (double t : thresholds) {
        if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("thresholds must lie in [0,1]");
    }

    const auto rows = sweep(scope.patches, sources, scope.known, thresholds, options);
    const json invocation = {{"command", "sweep"},
                             {"predictions", request.predictions.string()},
                             {"fp_predictions", request.fp_predictions ? request.fp_predictions->string() : ""},
                             {"thresholds", thresholds},
                             {"split", split_name(request.split)}};
    write_output(config.output_dir / "sweep.csv", render_metrics_csv(rows), config, invocation);
    write_output(config.output_dir / "sweep_per_class.csv", render_per_class_csv(rows), config, invocation);
    log << render_metrics_table(rows);
    return rows;
}

fs::path cmd_make_oracle(const PipelineConfig& config, const OracleRequest& request, std::ostream& log) {
    const auto output = request.output.value_or(config.output_dir /
                                                (request.multilabel ? "oracle_multilabel.csv" : "oracle_predictions.csv"));
    std::optional<std::set<std::string>> restrict_to;
    if (request.split) restrict_to = split_ids(config, *request.split);
    const auto in_scope = [&](const std::string& id) { return !restrict_to || restrict_to->count(id) > 0; };

    json invocation = {{"command", "make-oracle"}, {"seed", request.options.seed}, {"split", split_name(request.split)}};

    if (request.multilabel) {
        auto targets = load_multilabel_file(config.multilabel_path());
        std::erase_if(targets, [&](const MultilabelTarget& t) { return !in_scope(t.image_id); });
        const auto preds = make_oracle_multilabel(targets, request.options);
        write_output(output, render_multilabel_file(preds), config, invocation);
        log << "wrote " << preds.size() << " multilabel predictions -> " << output.string() << "\n";
        return output;
    }

    auto patches = load_patch_manifest(config.patch_manifest_path());
    std::erase_if(patches, [&](const PatchLabel& p) { return !in_scope(p.image_id); });

    auto options = request.options;
    std::map<std::string, ImageSize> sizes;
    if (options.mode == OracleMode::Spurious) {
        if (options.spurious_class.empty()) {
            options.spurious_class = request.fp_reduction ? std::string(kHealthy) : read_classes(config).front();
        }
        const auto loaded = load_dataset(config.dataset);
        for (const auto& r : loaded.records) {
            if (in_scope(r.image_id)) sizes[r.image_id] = {r.width_px, r.height_px};
        }
    }
    const auto preds = make_oracle_predictions(patches, sizes, options);
    write_output(output, render_prediction_file(preds), config, invocation);
    log << "wrote " << preds.size() << " predictions -> " << output.string() << "\n";
    return output;
}

namespace {

std::optional<Split> split_option(const std::string& name) {
    if (name.empty() || name == "all") return std::nullopt;
    const auto s = parse_split(name);
    if (!s) throw ConfigError("unknown split '" + name + "'");
    return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fracture morphology label extraction and evaluation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string output_dir;
    std::optional<long long> min_count;
    std::optional<std::uint64_t> seed;
    std::optional<double> iou;
    bool include_healthy = false;
    app.add_option("--config", config_path, "Pipeline config (JSON)")->required();
    app.add_option("--output-dir", output_dir, "Override output_dir");
    app.add_option("--min-count", min_count, "Override min_count");
    app.add_option("--seed", seed, "Override split/oracle seed");
    app.add_option("--iou", iou, "Override match IoU threshold");
    app.add_flag("--include-healthy", include_healthy, "Average metrics over Healthy as well");

    auto* split_cmd = app.add_subcommand("split", "Write a stratified train/val/test manifest");
    auto* extract_cmd = app.add_subcommand("extract", "Assign morphology labels to fracture boxes");

    EvalRequest eval_req;
    std::string eval_split;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate one prediction file");
    eval_cmd->add_option("--predictions", eval_req.predictions, "Prediction file")->required();
    eval_cmd->add_option("--classes", eval_req.classes_file, "index,predicted_class file");
    eval_cmd->add_flag("--gt-boxes", eval_req.gt_boxes, "Predictions come from GT boxes (no confidence filter)");
    eval_cmd->add_flag("--fp-reduction", eval_req.fp_reduction, "Classifier has a Healthy class");
    eval_cmd->add_flag("--multilabel", eval_req.multilabel, "Full-image multilabel evaluation");
    eval_cmd->add_option("--threshold", eval_req.threshold, "Detector confidence threshold");
    eval_cmd->add_option("--split", eval_split, "Restrict to train|val|test");

    SweepRequest sweep_req;
    std::string sweep_split;
    std::vector<double> sweep_thresholds;
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate across confidence thresholds");
    sweep_cmd->add_option("--predictions", sweep_req.predictions, "Prediction file")->required();
    sweep_cmd->add_option("--classes", sweep_req.classes_file, "index,predicted_class file");
    sweep_cmd->add_option("--fp-predictions", sweep_req.fp_predictions, "Predictions of the FP-reduction classifier");
    sweep_cmd->add_option("--fp-classes", sweep_req.fp_classes_file, "index,predicted_class file for --fp-predictions");
    sweep_cmd->add_flag("--fp-reduction", sweep_req.fp_reduction, "Treat --predictions as FP-reduction output");
    sweep_cmd->add_option("--thresholds", sweep_thresholds, "Ascending thresholds (default from config)");
    sweep_cmd->add_option("--split", sweep_split, "Restrict to train|val|test");

    OracleRequest oracle_req;
    std::string mode = "perfect";
    std::string k_text;
    std::string oracle_split;
    std::string drop_class;
    std::string spurious_class;
    auto* oracle_cmd = app.add_subcommand("make-oracle", "Write a synthetic prediction file from GT patches");
    oracle_cmd->add_option("--mode", mode, "perfect|drop-k|jitter|spurious")->required();
    oracle_cmd->add_option("--k", k_text, "drop-k: number to drop or 'all'");
    oracle_cmd->add_option("--drop-class", drop_class, "drop-k: only drop this class");
    oracle_cmd->add_option("--sigma", oracle_req.options.sigma, "jitter: corner noise (pixels)");
    oracle_cmd->add_option("--n", oracle_req.options.n, "spurious: boxes per image");
    oracle_cmd->add_option("--spurious-class", spurious_class, "spurious: predicted class of spurious boxes");
    oracle_cmd->add_option("--spurious-confidence", oracle_req.options.spurious_confidence, "spurious: confidence");
    oracle_cmd->add_flag("--fp-reduction", oracle_req.fp_reduction, "spurious boxes are predicted Healthy");
    oracle_cmd->add_flag("--multilabel", oracle_req.multilabel, "Write image-level multilabel predictions");
    oracle_cmd->add_option("--split", oracle_split, "Restrict to train|val|test");
    oracle_cmd->add_option("--output", oracle_req.output, "Output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        auto config = load_config(config_path);
        if (!output_dir.empty()) config.output_dir = output_dir;
        if (min_count) {
            if (*min_count < 0) throw ConfigError("--min-count must be non-negative");
            config.min_count = static_cast<std::size_t>(*min_count);
        }
        if (seed) config.seed = *seed;
        if (iou) config.match.iou_threshold = *iou;
        if (include_healthy) config.include_healthy = true;
        config.validate();

        if (*split_cmd) {
            cmd_split(config, out);
        } else if (*extract_cmd) {
            cmd_extract(config, out);
        } else if (*eval_cmd) {
            eval_req.split = split_option(eval_split);
            cmd_eval(config, eval_req, out);
        } else if (*sweep_cmd) {
            sweep_req.split = split_option(sweep_split);
            if (!sweep_thresholds.empty()) sweep_req.thresholds = sweep_thresholds;
            cmd_sweep(config, sweep_req, out);
        } else if (*oracle_cmd) {
            const auto m = parse_oracle_mode(mode);
            if (!m) throw ConfigError("unknown oracle mode '" + mode + "'");
            oracle_req.options.mode = *m;
            oracle_req.options.seed = config.seed;
            if (!k_text.empty() && k_text != "all") {
                const auto k = parse_int(k_text);
                if (!k || *k < 0) throw ConfigError("--k must be a non-negative integer or 'all'");
                oracle_req.options.k = static_cast<std::size_t>(*k);
            }
            if (*m == OracleMode::DropK && k_text.empty()) throw ConfigError("drop-k needs --k");
            if (!drop_class.empty()) oracle_req.options.drop_class = drop_class;
            oracle_req.options.spurious_class = spurious_class;
            oracle_req.split = split_option(oracle_split);
            cmd_make_oracle(config, oracle_req, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const InvariantViolation& e) {
        err << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace fracmorph::cli
