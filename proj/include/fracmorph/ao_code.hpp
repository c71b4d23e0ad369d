#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fracmorph {

enum class BoneQualifier { Radius, Ulna, Both, None };

std::string_view to_string(BoneQualifier q);

/// A paediatric AO/OTA code such as "22r-D/4.1".
///
/// Grammar: <digits><r|u>? '-' <letter> '/' <digits('.'digits)*>
///
/// A code without the r/u letter on a forearm segment (location starting
/// with '2') refers to both radius and ulna. Without the letter on any other
/// segment the qualifier is None.
struct AoCode {
    std::string location;            // segment digits, e.g. "22"
    BoneQualifier bone_qualifier = BoneQualifier::None;
    char fracture_type = '\0';       // uppercase letter, e.g. 'D'
    std::string sub_classification;  // e.g. "4.1"
    std::string raw;                 // text as it appeared in the input

    /// Canonical text form. Parsing the result yields an equal code.
    std::string render() const;

    bool is_bone_specific() const noexcept {
        return bone_qualifier == BoneQualifier::Radius || bone_qualifier == BoneQualifier::Ulna;
    }

    /// Compares the structural fields; `raw` is ignored.
    friend bool operator==(const AoCode& a, const AoCode& b) noexcept {
        return a.location == b.location && a.bone_qualifier == b.bone_qualifier &&
               a.fracture_type == b.fracture_type && a.sub_classification == b.sub_classification;
    }
};

/// Throws MalformedCode with the offset of the first offending character.
AoCode parse_ao_code(std::string_view text);

/// Both-bone codes become [radius variant, ulna variant]; anything else is
/// returned unchanged as a singleton.
std::vector<AoCode> expand_dual_bone(const AoCode& code);

std::vector<AoCode> expand_dual_bone(const std::vector<AoCode>& codes);

/// Splits a ';'-separated cell into codes. Empty cells give an empty list.
std::vector<AoCode> parse_ao_code_list(std::string_view cell);

}  // namespace fracmorph
