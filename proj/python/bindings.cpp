#include "fracmorph/ao_code.hpp"
#include "fracmorph/cli.hpp"
#include "fracmorph/detection_eval.hpp"
#include "fracmorph/errors.hpp"
#include "fracmorph/mapping_table.hpp"
#include "fracmorph/metrics.hpp"
#include "fracmorph/raster.hpp"
#include "fracmorph/split.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace fracmorph;

namespace {

using BoxTuple = std::tuple<double, double, double, double>;

PixelBox to_box(const BoxTuple& t) { return {std::get<0>(t), std::get<1>(t), std::get<2>(t), std::get<3>(t)}; }

std::vector<PixelBox> to_boxes(const std::vector<BoxTuple>& v) {
    std::vector<PixelBox> out;
    out.reserve(v.size());
    for (const auto& t : v) out.push_back(to_box(t));
    return out;
}

py::dict report_dict(const MetricReport& r) {
    py::dict d;
    d["accuracy"] = r.accuracy;
    d["precision"] = r.precision;
    d["recall"] = r.recall;
    d["f1"] = r.f1;
    py::list per_class;
    for (const auto& c : r.per_class) {
        py::dict m;
        m["name"] = c.name;
        m["precision"] = c.precision;
        m["recall"] = c.recall;
        m["f1"] = c.f1;
        m["accuracy"] = c.accuracy;
        m["support"] = c.support;
        per_class.append(m);
    }
    d["per_class"] = per_class;
    d["instances"] = r.instances;
    return d;
}

Split split_from_name(const std::string& name) {
    const auto s = parse_split(name);
    if (!s) throw Error("unknown split '" + name + "'");
    return *s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Fracture morphology label extraction and evaluation";

    auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<MalformedCode>(m, "MalformedCode", error.ptr());
    py::register_exception<UnmappedCode>(m, "UnmappedCode", error.ptr());
    py::register_exception<MappingConflict>(m, "MappingConflict", error.ptr());
    py::register_exception<ZeroCount>(m, "ZeroCount", error.ptr());
    py::register_exception<UnknownClass>(m, "UnknownClass", error.ptr());
    py::register_exception<EmptyCrop>(m, "EmptyCrop", error.ptr());
    py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

    py::class_<AoCode>(m, "AoCode")
        .def_readonly("location", &AoCode::location)
        .def_property_readonly("bone_qualifier", [](const AoCode& c) { return std::string(to_string(c.bone_qualifier)); })
        .def_property_readonly("fracture_type", [](const AoCode& c) { return std::string(1, c.fracture_type); })
        .def_readonly("sub_classification", &AoCode::sub_classification)
        .def_readonly("raw", &AoCode::raw)
        .def("render", &AoCode::render)
        .def("is_bone_specific", &AoCode::is_bone_specific)
        .def("__eq__", [](const AoCode& a, const AoCode& b) { return a == b; })
        .def("__str__", &AoCode::render)
        .def("__repr__", [](const AoCode& c) { return "AoCode('" + c.render() + "')"; });

    m.def("parse_ao_code", [](const std::string& text) { return parse_ao_code(text); }, py::arg("text"));
    m.def("parse_ao_code_list", [](const std::string& cell) { return parse_ao_code_list(cell); }, py::arg("cell"));
    m.def("expand_dual_bone", [](const AoCode& code) { return expand_dual_bone(code); }, py::arg("code"));
    m.def(
        "expand_dual_bone",
        [](const std::string& text) { return expand_dual_bone(parse_ao_code(text)); }, py::arg("text"));

    py::class_<MappingTable>(m, "MappingTable")
        .def_static("load", &MappingTable::load, py::arg("path"))
        .def_static(
            "parse", [](const std::string& content) { return MappingTable::parse(content); }, py::arg("content"))
        .def("classes", &MappingTable::classes)
        .def("__len__", [](const MappingTable& t) { return t.entries().size(); })
        .def(
            "morphology_of", [](const MappingTable& t, const AoCode& c) { return morphology_of(c, t); },
            py::arg("code"))
        .def(
            "morphology_of",
            [](const MappingTable& t, const std::string& text) { return morphology_of(parse_ao_code(text), t); },
            py::arg("code"));

    m.def(
        "iou", [](const BoxTuple& a, const BoxTuple& b) { return iou(to_box(a), to_box(b)); }, py::arg("a"), py::arg("b"),
        "IoU of two (x0, y0, x1, y1) boxes.");

    m.def(
        "greedy_match",
        [](const std::vector<BoxTuple>& gt, const std::vector<BoxTuple>& preds, const std::vector<double>& confidences,
           double iou_threshold) {
            if (confidences.size() != preds.size()) throw Error("one confidence per prediction is required");
            return greedy_match(to_boxes(gt), to_boxes(preds), confidences, iou_threshold);
        },
        py::arg("gt"), py::arg("preds"), py::arg("confidences"), py::arg("iou_threshold") = 0.5,
        "Matched GT index (or None) for each prediction.");

    py::class_<ConfusionTally>(m, "ConfusionTally")
        .def(py::init<std::vector<MorphologyClass>>(), py::arg("classes"))
        .def("classes", &ConfusionTally::classes)
        .def(
            "add",
            [](ConfusionTally& t, const std::string& truth, const std::optional<std::string>& predicted,
               std::size_t count) {
                std::optional<std::size_t> p;
                if (predicted) p = t.index_of(*predicted);
                t.add(t.index_of(truth), p, count);
            },
            py::arg("true_class"), py::arg("predicted_class"), py::arg("count") = 1,
            "predicted_class None records a missed fracture.")
        .def("tp", [](const ConfusionTally& t, const std::string& c) { return t.tp(t.index_of(c)); })
        .def("fp", [](const ConfusionTally& t, const std::string& c) { return t.fp(t.index_of(c)); })
        .def("fn", [](const ConfusionTally& t, const std::string& c) { return t.fn(t.index_of(c)); })
        .def("total", &ConfusionTally::total);

    m.def(
        "macro_metrics",
        [](const ConfusionTally& t, const std::vector<MorphologyClass>& over) { return report_dict(macro_metrics(t, over)); },
        py::arg("tally"), py::arg("averaged_over"));

    m.def(
        "multilabel_metrics",
        [](const std::map<std::string, std::set<MorphologyClass>>& targets,
           const std::map<std::string, std::set<MorphologyClass>>& predicted, const std::vector<MorphologyClass>& classes) {
            std::vector<MultilabelTarget> t;
            for (const auto& [id, present] : targets) t.push_back({id, present});
            return report_dict(multilabel_metrics(t, predicted, classes));
        },
        py::arg("targets"), py::arg("predicted"), py::arg("classes"));

    m.def(
        "inverse_frequency_weights",
        [](const std::map<std::string, std::size_t>& counts) {
            const auto w = inverse_frequency_weights(counts);
            return std::make_pair(w.loss, w.sample);
        },
        py::arg("counts"), "Returns (loss_weights, sample_weights).");

    m.def(
        "split_sizes", [](std::size_t n, const SplitRatios& ratios) { return split_sizes(n, ratios); }, py::arg("n"),
        py::arg("ratios") = SplitRatios{8, 1, 1});

    m.def(
        "stratified_split",
        [](const std::vector<std::pair<std::string, std::vector<std::string>>>& items, const SplitRatios& ratios,
           std::uint64_t seed) {
            std::vector<StratifyItem> in;
            for (const auto& [id, labels] : items) in.push_back({id, labels});
            std::map<std::string, std::string> out;
            for (const auto& [id, s] : stratified_split(in, ratios, seed)) out[id] = std::string(to_string(s));
            return out;
        },
        py::arg("items"), py::arg("ratios") = SplitRatios{8, 1, 1}, py::arg("seed") = 0,
        "items: list of (image_id, labels). Returns image_id -> 'train'|'val'|'test'.");
    m.def(
        "render_split_manifest",
        [](const std::vector<std::string>& ids, const std::map<std::string, std::string>& assignment) {
            std::map<std::string, Split> a;
            for (const auto& [id, name] : assignment) a[id] = split_from_name(name);
            return render_split_manifest(ids, a);
        },
        py::arg("ids"), py::arg("assignment"));

    m.def(
        "resize_bilinear",
        [](py::array_t<float, py::array::c_style | py::array::forcecast> image, int width, int height) {
            if (image.ndim() != 2) throw Error("expected a 2-D array");
            const auto h = static_cast<int>(image.shape(0)), w = static_cast<int>(image.shape(1));
            std::vector<float> data(image.data(), image.data() + image.size());
            GrayImage src(w, h, std::move(data));
            GrayImage out;
            {
                py::gil_scoped_release release;
                out = resize_bilinear(src, width, height);
            }
            py::array_t<float> result({height, width});
            std::copy(out.pixels().begin(), out.pixels().end(), result.mutable_data());
            return result;
        },
        py::arg("image"), py::arg("width"), py::arg("height"),
        "Corner-aligned bilinear resize of a (rows, cols) array.");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<const char*> argv{"fracmorph"};
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
