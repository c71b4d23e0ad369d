#pragma once

#include "fracmorph/ao_code.hpp"

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace fracmorph {

/// Name of a fracture morphology class. The set of names comes from the
/// mapping table; kHealthy is reserved for detector false positives.
using MorphologyClass = std::string;

inline constexpr std::string_view kHealthy = "Healthy";

struct MappingEntry {
    AoCode pattern;  // bone-specific after expansion
    MorphologyClass morphology;
};

/// AO code to morphology lookup. Entries written without a bone letter are
/// expanded to their radius and ulna variants on load, so every stored
/// pattern is bone-specific.
class MappingTable {
public:
    MappingTable() = default;

    /// Throws MappingConflict if a pattern would map to two morphologies,
    /// or if an entry is not bone-specific after expansion.
    void add(const AoCode& pattern, const MorphologyClass& morphology);

    /// Parses the `ao_pattern,morphology` format.
    static MappingTable parse(std::string_view content, std::string source = "<memory>");
    static MappingTable load(const std::filesystem::path& path);

    const std::vector<MappingEntry>& entries() const noexcept { return entries_; }

    /// Sorted, de-duplicated morphology names.
    std::vector<MorphologyClass> classes() const;

    const MorphologyClass* find(const AoCode& code) const;

    std::size_t min_count = 0;

private:
    std::vector<MappingEntry> entries_;
    std::map<std::string, std::size_t> index_;  // canonical text -> entry
};

/// Throws UnmappedCode when no entry matches. `code` must be bone-specific.
MorphologyClass morphology_of(const AoCode& code, const MappingTable& table);

}  // namespace fracmorph
