#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace holmes {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws InvalidArgument when missing.
    std::size_t column(std::string_view name) const;
};

CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(std::string_view text);

double parse_double(std::string_view text);
long long parse_int(std::string_view text);
std::string trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

/// Writes to `path.tmp` then renames over `path`. Creates parent directories.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

/// Flat `key = value` file; `#` starts a comment. Throws on malformed lines or duplicate keys.
std::map<std::string, std::string> parse_key_values(std::string_view text);
std::map<std::string, std::string> read_key_values(const std::filesystem::path& path);

}  // namespace holmes
