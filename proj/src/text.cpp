#include "fracmorph/text.hpp"

#include "fracmorph/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace fracmorph {

std::vector<std::string> split(std::string_view text, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(delim, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(text.substr(start));
            break;
        }
        out.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string trim(std::string_view text) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    return std::string(text.substr(b, e - b));
}

std::vector<std::string> split_record(std::string_view line, char delim) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"' && current.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c != '\r') {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

std::string join_record(const std::vector<std::string>& fields, char delim) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += delim;
        const auto& f = fields[i];
        if (f.find_first_of(std::string{delim, '"', '\n'}) != std::string::npos) {
            out += '"';
            for (char c : f) {
                if (c == '"') out += '"';
                out += c;
            }
            out += '"';
        } else {
            out += f;
        }
    }
    return out;
}

Table Table::parse(std::string_view content, char delim, std::string source) {
    Table t;
    t.source_ = std::move(source);
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t start = 0;
    while (start <= content.size()) {
        auto end = content.find('\n', start);
        if (end == std::string_view::npos) end = content.size();
        const auto line = content.substr(start, end - start);
        ++line_no;
        start = end + 1;

        const auto stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') {
            if (end == content.size()) break;
            continue;
        }
        auto fields = split_record(line, delim);
        for (auto& f : fields) f = trim(f);
        if (!have_header) {
            t.header_ = std::move(fields);
            have_header = true;
        } else {
            if (fields.size() != t.header_.size()) {
                throw SchemaError(t.source_ + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(t.header_.size()) + " fields, got " +
                                  std::to_string(fields.size()));
            }
            t.rows_.push_back(std::move(fields));
            t.lines_.push_back(line_no);
        }
        if (end == content.size()) break;
    }
    if (!have_header) {
        throw SchemaError(t.source_ + ": missing header row");
    }
    return t;
}

Table Table::read(const std::filesystem::path& path, char delim) {
    return parse(read_file(path), delim, path.string());
}

std::optional<std::size_t> Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name) return i;
    }
    return std::nullopt;
}

std::size_t Table::require_column(std::string_view name) const {
    if (auto c = column(name)) return *c;
    throw SchemaError(source_ + ": missing column '" + std::string(name) + "'");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MissingFile(path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            throw Error("write failed: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::optional<double> parse_double(std::string_view token) {
    const auto t = trim(token);
    if (t.empty()) return std::nullopt;
    double value = 0.0;
    const char* first = t.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size()) return std::nullopt;
    return value;
}

std::optional<long long> parse_int(std::string_view token) {
    const auto t = trim(token);
    if (t.empty()) return std::nullopt;
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size()) return std::nullopt;
    return value;
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

}  // namespace fracmorph
