#include "fracmorph/mapping_table.hpp"

#include "fracmorph/errors.hpp"
#include "fracmorph/text.hpp"

#include <algorithm>

namespace fracmorph {

void MappingTable::add(const AoCode& pattern, const MorphologyClass& morphology) {
    if (morphology.empty()) {
        throw MappingConflict("empty morphology for pattern " + pattern.render());
    }
    if (morphology == kHealthy) {
        throw MappingConflict("'Healthy' is reserved and cannot be a mapping target");
    }
    for (const auto& variant : expand_dual_bone(pattern)) {
        if (!variant.is_bone_specific()) {
            throw MappingConflict("pattern " + pattern.render() + " has no radius/ulna qualifier");
        }
        const auto key = variant.render();
        if (auto it = index_.find(key); it != index_.end()) {
            if (entries_[it->second].morphology != morphology) {
                throw MappingConflict("pattern " + key + " maps to both '" + entries_[it->second].morphology +
                                      "' and '" + morphology + "'");
            }
            continue;
        }
        index_.emplace(key, entries_.size());
        entries_.push_back({variant, morphology});
    }
}

MappingTable MappingTable::parse(std::string_view content, std::string source) {
    const auto table = Table::parse(content, ',', source);
    const auto pattern_col = table.require_column("ao_pattern");
    const auto morph_col = table.require_column("morphology");

    MappingTable mapping;
    for (std::size_t i = 0; i < table.rows(); ++i) {
        const auto& row = table.row(i);
        try {
            mapping.add(parse_ao_code(row[pattern_col]), row[morph_col]);
        } catch (const Error& e) {
            throw MappingConflict(source + ":" + std::to_string(table.line_of(i)) + ": " + e.what());
        }
    }
    return mapping;
}

MappingTable MappingTable::load(const std::filesystem::path& path) {
    return parse(read_file(path), path.string());
}

std::vector<MorphologyClass> MappingTable::classes() const {
    std::vector<MorphologyClass> out;
    for (const auto& e : entries_) out.push_back(e.morphology);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

const MorphologyClass* MappingTable::find(const AoCode& code) const {
    const auto it = index_.find(code.render());
    return it == index_.end() ? nullptr : &entries_[it->second].morphology;
}

MorphologyClass morphology_of(const AoCode& code, const MappingTable& table) {
    if (const auto* m = table.find(code)) {
        return *m;
    }
    throw UnmappedCode(code.render());
}

}  // namespace fracmorph
