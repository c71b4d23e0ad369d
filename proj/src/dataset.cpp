#include "fracmorph/dataset.hpp"

#include "fracmorph/errors.hpp"
#include "fracmorph/text.hpp"

#include <set>
#include <sstream>

namespace fracmorph {

std::string_view to_string(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
        case Split::Unassigned: return "unassigned";
    }
    return "unassigned";
}

std::optional<Split> parse_split(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "val") return Split::Val;
    if (name == "test") return Split::Test;
    if (name == "unassigned") return Split::Unassigned;
    return std::nullopt;
}

std::optional<MaskClass> parse_mask_class(std::string_view name) {
    if (name == "background") return MaskClass::Background;
    if (name == "radius") return MaskClass::Radius;
    if (name == "ulna") return MaskClass::Ulna;
    if (name == "radius-epiphysis") return MaskClass::RadiusEpiphysis;
    if (name == "ulna-epiphysis") return MaskClass::UlnaEpiphysis;
    return std::nullopt;
}

MaskLegend::MaskLegend(std::map<int, MaskClass> entries) : entries_(std::move(entries)) {}

MaskLegend MaskLegend::default_legend() {
    return MaskLegend({{0, MaskClass::Background},
                       {1, MaskClass::Radius},
                       {2, MaskClass::Ulna},
                       {3, MaskClass::RadiusEpiphysis},
                       {4, MaskClass::UlnaEpiphysis}});
}

const MaskClass* MaskLegend::lookup(int value) const {
    const auto it = entries_.find(value);
    return it == entries_.end() ? nullptr : &it->second;
}

void SegmentationMask::validate() const {
    std::set<int> seen;
    for (auto v : labels.pixels()) seen.insert(v);
    for (int v : seen) {
        if (!legend.lookup(v)) {
            throw ImageError("mask pixel value " + std::to_string(v) + " is not in the legend");
        }
    }
}

SegmentationMask load_mask(const std::filesystem::path& path, const MaskLegend& legend) {
    SegmentationMask mask{read_label_png(path), legend};
    mask.validate();
    return mask;
}

std::pair<int, BBox> parse_box_label_line(std::string_view line, std::size_t line_no) {
    std::istringstream in{std::string(line)};
    std::vector<std::string> fields;
    for (std::string f; in >> f;) fields.push_back(f);
    if (fields.size() != 5) {
        throw MalformedLabelLine(line_no, "expected 5 fields, got " + std::to_string(fields.size()));
    }
    const auto cls = parse_int(fields[0]);
    if (!cls || *cls < 0) {
        throw MalformedLabelLine(line_no, "class index '" + fields[0] + "' is not a non-negative integer");
    }
    double v[4];
    for (int i = 0; i < 4; ++i) {
        const auto d = parse_double(fields[static_cast<std::size_t>(i) + 1]);
        if (!d) {
            throw MalformedLabelLine(line_no, "field '" + fields[static_cast<std::size_t>(i) + 1] + "' is not numeric");
        }
        if (!(*d >= 0.0 && *d <= 1.0)) {
            throw OutOfRange("label line " + std::to_string(line_no) + ": coordinate " + fields[static_cast<std::size_t>(i) + 1] +
                             " outside [0,1]");
        }
        v[i] = *d;
    }
    if (v[2] <= 0.0 || v[3] <= 0.0) {
        throw OutOfRange("label line " + std::to_string(line_no) + ": box width and height must be positive");
    }
    return {static_cast<int>(*cls), BBox{v[0], v[1], v[2], v[3]}};
}

namespace {

std::vector<BBox> read_label_file(const std::filesystem::path& path, int fracture_class) {
    std::vector<BBox> boxes;
    if (!std::filesystem::exists(path)) return boxes;
    const auto content = read_file(path);
    std::size_t line_no = 0;
    for (const auto& line : split(content, '\n')) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto [cls, box] = parse_box_label_line(line, line_no);
        if (fracture_class < 0 || cls == fracture_class) boxes.push_back(box);
    }
    return boxes;
}

}  // namespace

LoadResult load_dataset(const DatasetLayout& layout) {
    const auto meta_path = layout.metadata_path();
    if (!std::filesystem::exists(meta_path)) {
        throw MissingFile(meta_path.string());
    }
    Table table = [&] {
        try {
            return Table::read(meta_path);
        } catch (const SchemaError& e) {
            throw MetadataSchemaError(e.what());
        }
    }();
    const auto stem_col = table.column("filestem");
    const auto ao_col = table.column("ao_classification");
    if (!stem_col || !ao_col) {
        throw MetadataSchemaError(meta_path.string() + ": requires columns 'filestem' and 'ao_classification'");
    }
    const auto width_col = table.column("width");
    const auto height_col = table.column("height");

    LoadResult result;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto& row = table.row(i);
        ImageRecord rec;
        rec.image_id = row[*stem_col];
        try {
            if (rec.image_id.empty()) throw Error("empty filestem");
            if (!seen.insert(rec.image_id).second) throw Error("duplicate image id");

            rec.ao_codes = parse_ao_code_list(row[*ao_col]);
            rec.mask_path = layout.mask_path(rec.image_id);
            rec.image_path = layout.image_path(rec.image_id);
            rec.boxes = read_label_file(layout.label_path(rec.image_id), layout.fracture_class);

            if (width_col && height_col && !row[*width_col].empty() && !row[*height_col].empty()) {
                const auto w = parse_int(row[*width_col]);
                const auto h = parse_int(row[*height_col]);
                if (!w || !h || *w <= 0 || *h <= 0) throw Error("width/height must be positive integers");
                rec.width_px = static_cast<int>(*w);
                rec.height_px = static_cast<int>(*h);
            } else if (std::filesystem::exists(rec.mask_path)) {
                const auto size = read_png_size(rec.mask_path);
                rec.width_px = size.width;
                rec.height_px = size.height;
            } else if (std::filesystem::exists(rec.image_path)) {
                const auto size = read_png_size(rec.image_path);
                rec.width_px = size.width;
                rec.height_px = size.height;
            } else {
                throw Error("image size unknown: no width/height columns, mask or image file");
            }
            result.records.push_back(std::move(rec));
        } catch (const Error& e) {
            result.rejected.push_back({table.line_of(i), row[*stem_col], e.what()});
        }
    }
    return result;
}

std::vector<std::string> load_image_ids(const DatasetLayout& layout) {
    const auto meta_path = layout.metadata_path();
    if (!std::filesystem::exists(meta_path)) {
        throw MissingFile(meta_path.string());
    }
    const auto table = Table::read(meta_path);
    const auto stem_col = table.column("filestem");
    if (!stem_col) throw MetadataSchemaError(meta_path.string() + ": requires column 'filestem'");
    std::vector<std::string> ids;
    ids.reserve(table.rows());
    for (std::size_t i = 0; i < table.rows(); ++i) ids.push_back(table.row(i)[*stem_col]);
    return ids;
}

}  // namespace fracmorph
