#include "fracmorph/assignment.hpp"

#include "fracmorph/errors.hpp"
#include "fracmorph/text.hpp"

#include <algorithm>

namespace fracmorph {

std::string_view to_string(BoneClass b) { return b == BoneClass::Radius ? "radius" : "ulna"; }

std::optional<BoneClass> parse_bone(std::string_view name) {
    if (name == "radius") return BoneClass::Radius;
    if (name == "ulna") return BoneClass::Ulna;
    return std::nullopt;
}

std::optional<BoneClass> fold(MaskClass c) noexcept {
    switch (c) {
        case MaskClass::Radius:
        case MaskClass::RadiusEpiphysis: return BoneClass::Radius;
        case MaskClass::Ulna:
        case MaskClass::UlnaEpiphysis: return BoneClass::Ulna;
        case MaskClass::Background: return std::nullopt;
    }
    return std::nullopt;
}

std::optional<BoneClass> bone_of_qualifier(BoneQualifier q) noexcept {
    if (q == BoneQualifier::Radius) return BoneClass::Radius;
    if (q == BoneQualifier::Ulna) return BoneClass::Ulna;
    return std::nullopt;
}

BoneVote bone_of_box(const PixelRect& rect, const SegmentationMask& mask) {
    const auto r = rect.clipped(mask.labels.width(), mask.labels.height());
    if (r.empty()) {
        throw EmptyCrop("box is empty after clipping to the mask");
    }
    BoneVote vote;
    for (int y = r.y0; y < r.y1; ++y) {
        for (int x = r.x0; x < r.x1; ++x) {
            const auto* cls = mask.legend.lookup(mask.labels.at(x, y));
            if (!cls) {
                throw ImageError("mask pixel value " + std::to_string(mask.labels.at(x, y)) + " is not in the legend");
            }
            if (const auto bone = fold(*cls)) {
                ++(*bone == BoneClass::Radius ? vote.radius_pixels : vote.ulna_pixels);
            }
        }
    }
    if (vote.radius_pixels == 0 && vote.ulna_pixels == 0) {
        throw NoBonePixels("box contains only background pixels");
    }
    vote.tie = vote.radius_pixels == vote.ulna_pixels;
    vote.bone = vote.ulna_pixels > vote.radius_pixels ? BoneClass::Ulna : BoneClass::Radius;
    return vote;
}

BoneVote bone_of_box(const BBox& box, const SegmentationMask& mask) {
    return bone_of_box(box.to_rect(mask.labels.width(), mask.labels.height()), mask);
}

std::string_view to_string(DiagnosticKind k) {
    switch (k) {
        case DiagnosticKind::UnmatchedBox: return "UnmatchedBox";
        case DiagnosticKind::UnmatchedCode: return "UnmatchedCode";
        case DiagnosticKind::UnmappedCode: return "UnmappedCode";
        case DiagnosticKind::NoBoneCode: return "NoBoneCode";
        case DiagnosticKind::NoBonePixels: return "NoBonePixels";
        case DiagnosticKind::BoneTie: return "BoneTie";
        case DiagnosticKind::OrderAmbiguity: return "OrderAmbiguity";
        case DiagnosticKind::MaskError: return "MaskError";
        case DiagnosticKind::ExcludedClass: return "ExcludedClass";
    }
    return "Unknown";
}

std::size_t Diagnostics::count(DiagnosticKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(items.begin(), items.end(), [kind](const Diagnostic& d) { return d.kind == kind; }));
}

std::map<DiagnosticKind, std::size_t> Diagnostics::counts() const {
    std::map<DiagnosticKind, std::size_t> out;
    for (const auto& d : items) ++out[d.kind];
    return out;
}

MatchResult match_boxes_to_codes(std::span<const std::optional<BoneClass>> box_bones, std::span<const AoCode> codes) {
    MatchResult result;
    for (const auto bone : {BoneClass::Radius, BoneClass::Ulna}) {
        std::vector<std::size_t> boxes;
        std::vector<std::size_t> bone_codes;
        for (std::size_t i = 0; i < box_bones.size(); ++i) {
            if (box_bones[i] == bone) boxes.push_back(i);
        }
        for (std::size_t i = 0; i < codes.size(); ++i) {
            if (bone_of_qualifier(codes[i].bone_qualifier) == bone) bone_codes.push_back(i);
        }
        const auto n = std::min(boxes.size(), bone_codes.size());
        for (std::size_t k = 0; k < n; ++k) {
            result.pairs.push_back({boxes[k], bone_codes[k]});
        }
        for (std::size_t k = n; k < boxes.size(); ++k) result.unmatched_boxes.push_back(boxes[k]);
        for (std::size_t k = n; k < bone_codes.size(); ++k) result.unmatched_codes.push_back(bone_codes[k]);

        if (n >= 2) {
            for (std::size_t k = 1; k < n; ++k) {
                if (!(codes[bone_codes[k]] == codes[bone_codes[0]])) result.order_ambiguous = true;
            }
        }
    }
    for (std::size_t i = 0; i < box_bones.size(); ++i) {
        if (!box_bones[i]) result.unmatched_boxes.push_back(i);
    }
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (!codes[i].is_bone_specific()) result.unmatched_codes.push_back(i);
    }
    std::sort(result.pairs.begin(), result.pairs.end(),
              [](const BoxCodePair& a, const BoxCodePair& b) { return a.box < b.box; });
    std::sort(result.unmatched_boxes.begin(), result.unmatched_boxes.end());
    std::sort(result.unmatched_codes.begin(), result.unmatched_codes.end());
    return result;
}

MaskProvider file_mask_provider(MaskLegend legend) {
    return [legend = std::move(legend)](const ImageRecord& record) { return load_mask(record.mask_path, legend); };
}

namespace {

std::string rect_text(const PixelRect& r) {
    return "(" + std::to_string(r.x0) + "," + std::to_string(r.y0) + "," + std::to_string(r.x1) + "," +
           std::to_string(r.y1) + ")";
}

void extract_image(const ImageRecord& rec, const MappingTable& mapping, const MaskProvider& masks,
                   const ExtractOptions& options, std::vector<PatchLabel>& out, Diagnostics& diag) {
    const auto codes = expand_dual_bone(rec.ao_codes);
    if (rec.boxes.empty() && codes.empty()) return;

    std::vector<std::optional<BoneClass>> bones(rec.boxes.size());
    std::vector<PixelRect> rects(rec.boxes.size());
    for (std::size_t i = 0; i < rec.boxes.size(); ++i) {
        rects[i] = rec.boxes[i].to_rect(rec.width_px, rec.height_px);
    }

    if (!rec.boxes.empty()) {
        std::optional<SegmentationMask> mask;
        try {
            mask = masks(rec);
            if (mask->labels.width() != rec.width_px || mask->labels.height() != rec.height_px) {
                throw ImageError("mask is " + std::to_string(mask->labels.width()) + "x" +
                                 std::to_string(mask->labels.height()) + ", image is " + std::to_string(rec.width_px) +
                                 "x" + std::to_string(rec.height_px));
            }
        } catch (const Error& e) {
            diag.add(rec.image_id, DiagnosticKind::MaskError, e.what());
            mask.reset();
        }
        if (mask) {
            for (std::size_t i = 0; i < rec.boxes.size(); ++i) {
                try {
                    const auto vote = bone_of_box(rects[i], *mask);
                    bones[i] = vote.bone;
                    if (vote.tie) {
                        diag.add(rec.image_id, DiagnosticKind::BoneTie,
                                 "box " + std::to_string(i) + " " + rect_text(rects[i]) + " radius=ulna=" +
                                     std::to_string(vote.radius_pixels) + ", chose radius");
                    }
                } catch (const Error& e) {
                    diag.add(rec.image_id, DiagnosticKind::NoBonePixels,
                             "box " + std::to_string(i) + " " + rect_text(rects[i]) + ": " + e.what());
                }
            }
        }
    }

    for (const auto& c : codes) {
        if (!c.is_bone_specific()) {
            diag.add(rec.image_id, DiagnosticKind::NoBoneCode, c.render());
        }
    }

    const auto match = match_boxes_to_codes(bones, codes);
    for (auto b : match.unmatched_boxes) {
        if (bones[b]) {
            diag.add(rec.image_id, DiagnosticKind::UnmatchedBox,
                     "box " + std::to_string(b) + " " + rect_text(rects[b]) + " bone=" + std::string(to_string(*bones[b])));
        }
    }
    for (auto c : match.unmatched_codes) {
        if (codes[c].is_bone_specific()) {
            diag.add(rec.image_id, DiagnosticKind::UnmatchedCode, codes[c].render());
        }
    }
    if (match.order_ambiguous) {
        diag.add(rec.image_id, DiagnosticKind::OrderAmbiguity, "same-bone boxes paired with distinct codes by input order");
    }

    for (const auto& pair : match.pairs) {
        const auto& code = codes[pair.code];
        const auto* morph = mapping.find(code);
        if (!morph) {
            diag.add(rec.image_id, DiagnosticKind::UnmappedCode, code.render());
            continue;
        }
        PatchLabel p;
        p.image_id = rec.image_id;
        p.box = rec.boxes[pair.box];
        p.box_rect = rects[pair.box];
        p.crop_rect = rec.boxes[pair.box].to_rect(rec.width_px, rec.height_px, options.crop_margin);
        p.bone = *bones[pair.box];
        p.morphology = *morph;
        p.source_code = code;
        p.split = rec.split;
        p.box_index = pair.box;
        out.push_back(std::move(p));
    }
}

}  // namespace

ExtractResult emit_patch_labels(const std::vector<ImageRecord>& records, const MappingTable& mapping,
                                const MaskProvider& masks, const ExtractOptions& options) {
    std::vector<const ImageRecord*> ordered;
    ordered.reserve(records.size());
    for (const auto& r : records) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const ImageRecord* a, const ImageRecord* b) { return a->image_id < b->image_id; });

    ExtractResult result;
    std::vector<PatchLabel> candidates;
    for (const auto* rec : ordered) {
        extract_image(*rec, mapping, masks, options, candidates, result.diagnostics);
    }

    const bool has_train =
        std::any_of(records.begin(), records.end(), [](const ImageRecord& r) { return r.split == Split::Train; });
    for (const auto& p : candidates) {
        if (!has_train || p.split == Split::Train) ++result.class_counts[p.morphology];
    }
    // Classes with no counted patch are reported with a zero count.
    for (const auto& p : candidates) result.class_counts.emplace(p.morphology, 0);

    std::set<MorphologyClass> retained;
    for (const auto& [cls, n] : result.class_counts) {
        if (n >= options.min_count) {
            retained.insert(cls);
        } else {
            result.excluded_classes.push_back(cls);
        }
    }
    result.retained_classes.assign(retained.begin(), retained.end());

    for (auto& p : candidates) {
        if (retained.count(p.morphology)) {
            result.patches.push_back(std::move(p));
        } else {
            result.diagnostics.add(p.image_id, DiagnosticKind::ExcludedClass,
                                   p.morphology + " from " + p.source_code.render() + " (count " +
                                       std::to_string(result.class_counts[p.morphology]) + " < min_count " +
                                       std::to_string(options.min_count) + ")");
        }
    }
    return result;
}

std::vector<MorphologyClass> record_morphologies(const ImageRecord& record, const MappingTable& mapping) {
    std::vector<MorphologyClass> out;
    for (const auto& code : expand_dual_bone(record.ao_codes)) {
        if (const auto* m = mapping.find(code)) out.push_back(*m);
    }
    return out;
}

std::vector<MultilabelTarget> build_multilabel_targets(const std::vector<ImageRecord>& records,
                                                       const MappingTable& mapping,
                                                       const std::optional<std::set<MorphologyClass>>& retained) {
    std::vector<MultilabelTarget> out;
    out.reserve(records.size());
    for (const auto& rec : records) {
        MultilabelTarget t{rec.image_id, {}};
        for (auto& m : record_morphologies(rec, mapping)) {
            if (!retained || retained->count(m)) t.present.insert(std::move(m));
        }
        out.push_back(std::move(t));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const MultilabelTarget& a, const MultilabelTarget& b) { return a.image_id < b.image_id; });
    return out;
}

std::string render_patch_manifest(const std::vector<PatchLabel>& patches) {
    std::string out = "image_id,x0,y0,x1,y1,bone,morphology,source_code\n";
    for (const auto& p : patches) {
        out += join_record({p.image_id, std::to_string(p.box_rect.x0), std::to_string(p.box_rect.y0),
                            std::to_string(p.box_rect.x1), std::to_string(p.box_rect.y1), std::string(to_string(p.bone)),
                            p.morphology, p.source_code.render()},
                           ',');
        out += '\n';
    }
    return out;
}

std::vector<PatchLabel> parse_patch_manifest(std::string_view content, const std::string& source) {
    const auto table = Table::parse(content, ',', source);
    const std::size_t cols[8] = {table.require_column("image_id"), table.require_column("x0"),
                                 table.require_column("y0"),       table.require_column("x1"),
                                 table.require_column("y1"),       table.require_column("bone"),
                                 table.require_column("morphology"), table.require_column("source_code")};
    std::vector<PatchLabel> out;
    std::map<std::string, std::size_t> per_image;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto& row = table.row(i);
        const auto where = source + ":" + std::to_string(table.line_of(i));
        PatchLabel p;
        p.image_id = row[cols[0]];
        int coords[4];
        for (int k = 0; k < 4; ++k) {
            const auto v = parse_int(row[cols[k + 1]]);
            if (!v) throw SchemaError(where + ": non-integer coordinate '" + row[cols[k + 1]] + "'");
            coords[k] = static_cast<int>(*v);
        }
        p.box_rect = {coords[0], coords[1], coords[2], coords[3]};
        if (p.box_rect.empty()) throw SchemaError(where + ": empty rectangle");
        p.crop_rect = p.box_rect;
        const auto bone = parse_bone(row[cols[5]]);
        if (!bone) throw SchemaError(where + ": unknown bone '" + row[cols[5]] + "'");
        p.bone = *bone;
        p.morphology = row[cols[6]];
        if (p.morphology.empty()) throw SchemaError(where + ": empty morphology");
        try {
            p.source_code = parse_ao_code(row[cols[7]]);
        } catch (const MalformedCode& e) {
            throw SchemaError(where + ": " + e.what());
        }
        p.box_index = per_image[p.image_id]++;
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<PatchLabel> load_patch_manifest(const std::filesystem::path& path) {
    return parse_patch_manifest(read_file(path), path.string());
}

std::string render_multilabel_file(const std::vector<MultilabelTarget>& targets) {
    std::string out = "image_id,classes\n";
    for (const auto& t : targets) {
        std::string classes;
        for (const auto& c : t.present) {
            if (!classes.empty()) classes += ';';
            classes += c;
        }
        out += join_record({t.image_id, classes}, ',');
        out += '\n';
    }
    return out;
}

std::vector<MultilabelTarget> parse_multilabel_file(std::string_view content, const std::string& source) {
    const auto table = Table::parse(content, ',', source);
    const auto id_col = table.require_column("image_id");
    const auto cls_col = table.require_column("classes");
    std::vector<MultilabelTarget> out;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        MultilabelTarget t{table.row(i)[id_col], {}};
        for (const auto& c : split(table.row(i)[cls_col], ';')) {
            auto name = trim(c);
            if (!name.empty()) t.present.insert(std::move(name));
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<MultilabelTarget> load_multilabel_file(const std::filesystem::path& path) {
    return parse_multilabel_file(read_file(path), path.string());
}

std::string render_diagnostics(const Diagnostics& diagnostics) {
    std::string out;
    for (const auto& d : diagnostics.items) {
        out += to_string(d.kind);
        out += '\t';
        out += d.image_id;
        out += '\t';
        out += d.detail;
        out += '\n';
    }
    return out;
}

}  // namespace fracmorph
