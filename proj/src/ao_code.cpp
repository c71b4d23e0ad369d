#include "fracmorph/ao_code.hpp"

#include "fracmorph/errors.hpp"
#include "fracmorph/text.hpp"

#include <cctype>

namespace fracmorph {

std::string_view to_string(BoneQualifier q) {
    switch (q) {
        case BoneQualifier::Radius: return "radius";
        case BoneQualifier::Ulna: return "ulna";
        case BoneQualifier::Both: return "both";
        case BoneQualifier::None: return "none";
    }
    return "none";
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

AoCode parse_ao_code(std::string_view text) {
    const std::string owned(text);
    if (text.empty()) {
        throw MalformedCode(owned, 0, "empty code");
    }

    AoCode code;
    code.raw = owned;
    std::size_t pos = 0;

    while (pos < text.size() && is_digit(text[pos])) {
        ++pos;
    }
    if (pos == 0) {
        throw MalformedCode(owned, 0, "expected location digits");
    }
    code.location = owned.substr(0, pos);

    if (pos < text.size() && (text[pos] == 'r' || text[pos] == 'u')) {
        code.bone_qualifier = text[pos] == 'r' ? BoneQualifier::Radius : BoneQualifier::Ulna;
        ++pos;
    } else {
        code.bone_qualifier = code.location.front() == '2' ? BoneQualifier::Both : BoneQualifier::None;
    }

    if (pos >= text.size() || text[pos] != '-') {
        throw MalformedCode(owned, pos, "expected '-' or bone letter");
    }
    ++pos;

    if (pos >= text.size() || !std::isupper(static_cast<unsigned char>(text[pos]))) {
        throw MalformedCode(owned, pos, "expected uppercase fracture type");
    }
    code.fracture_type = text[pos];
    ++pos;

    if (pos >= text.size() || text[pos] != '/') {
        throw MalformedCode(owned, pos, "expected '/'");
    }
    ++pos;

    const std::size_t sub_start = pos;
    bool need_digit = true;
    while (pos < text.size()) {
        const char c = text[pos];
        if (is_digit(c)) {
            need_digit = false;
        } else if (c == '.' && !need_digit) {
            need_digit = true;
        } else {
            throw MalformedCode(owned, pos, "unexpected character in sub-classification");
        }
        ++pos;
    }
    if (need_digit) {
        throw MalformedCode(owned, pos, "sub-classification must end with a digit");
    }
    code.sub_classification = owned.substr(sub_start);
    return code;
}

std::string AoCode::render() const {
    std::string out = location;
    if (bone_qualifier == BoneQualifier::Radius) {
        out += 'r';
    } else if (bone_qualifier == BoneQualifier::Ulna) {
        out += 'u';
    }
    out += '-';
    out += fracture_type;
    out += '/';
    out += sub_classification;
    return out;
}

std::vector<AoCode> expand_dual_bone(const AoCode& code) {
    if (code.bone_qualifier != BoneQualifier::Both) {
        return {code};
    }
    AoCode radius = code;
    radius.bone_qualifier = BoneQualifier::Radius;
    AoCode ulna = code;
    ulna.bone_qualifier = BoneQualifier::Ulna;
    return {radius, ulna};
}

std::vector<AoCode> expand_dual_bone(const std::vector<AoCode>& codes) {
    std::vector<AoCode> out;
    out.reserve(codes.size() * 2);
    for (const auto& code : codes) {
        for (auto& variant : expand_dual_bone(code)) {
            out.push_back(std::move(variant));
        }
    }
    return out;
}

std::vector<AoCode> parse_ao_code_list(std::string_view cell) {
    std::vector<AoCode> out;
    for (const auto& piece : split(cell, ';')) {
        const auto token = trim(piece);
        if (!token.empty()) {
            out.push_back(parse_ao_code(token));
        }
    }
    return out;
}

}  // namespace fracmorph
