#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fracmorph {

std::vector<std::string> split(std::string_view text, char delim);
std::string trim(std::string_view text);

/// Splits one delimited record, honouring double-quoted fields ("" escapes a quote).
std::vector<std::string> split_record(std::string_view line, char delim);

/// Joins fields, quoting any that contain the delimiter, a quote or a newline.
std::string join_record(const std::vector<std::string>& fields, char delim);

/// A delimiter-separated file with a header row. Blank lines and lines
/// starting with '#' are skipped.
class Table {
public:
    static Table read(const std::filesystem::path& path, char delim = ',');
    static Table parse(std::string_view content, char delim = ',', std::string source = "<memory>");

    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    const std::vector<std::string>& row(std::size_t i) const { return rows_.at(i); }
    /// 1-based line number of row i in the source, for error messages.
    std::size_t line_of(std::size_t i) const { return lines_.at(i); }

    std::optional<std::size_t> column(std::string_view name) const;
    /// Throws SchemaError when the column is absent.
    std::size_t require_column(std::string_view name) const;

    const std::string& source() const noexcept { return source_; }

private:
    std::string source_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::size_t> lines_;
};

/// Reads a whole file; throws MissingFile when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Parses a double, requiring the whole (trimmed) token to be consumed.
std::optional<double> parse_double(std::string_view token);
std::optional<long long> parse_int(std::string_view token);

/// Shortest decimal form that round-trips the double.
std::string format_double(double value);

}  // namespace fracmorph
