#include "holmes/io.hpp"

#include "holmes/common.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace holmes {

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw InvalidArgument("CSV: missing column '" + std::string(name) + "'");
}

std::string trim(std::string_view text) {
    const auto b = text.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = text.find_last_not_of(" \t\r\n");
    return std::string(text.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = text.find(sep, start);
        out.push_back(trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

CsvTable parse_csv(std::string_view text) {
    CsvTable t;
    std::istringstream in{std::string(text)};
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split(line, ',');
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            HOLMES_REQUIRE(cells.size() == t.header.size(), InvalidArgument,
                           "CSV: row has " + std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(t.header.size()));
            t.rows.push_back(std::move(cells));
        }
    }
    HOLMES_REQUIRE(!first, InvalidArgument, "CSV: empty input");
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    HOLMES_REQUIRE(in.good(), InvalidArgument, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

double parse_double(std::string_view text) {
    const std::string s = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    HOLMES_REQUIRE(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(), InvalidArgument,
                   "not a number: '" + s + "'");
    return v;
}

long long parse_int(std::string_view text) {
    const std::string s = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    HOLMES_REQUIRE(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(), InvalidArgument,
                   "not an integer: '" + s + "'");
    return v;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        HOLMES_REQUIRE(out.good(), InvalidArgument, "cannot write " + tmp.string());
        out << contents;
        out.flush();
        HOLMES_REQUIRE(out.good(), InvalidArgument, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
    std::map<std::string, std::string> kv;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        HOLMES_REQUIRE(eq != std::string::npos, InvalidArgument,
                       "line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        HOLMES_REQUIRE(!key.empty(), InvalidArgument, "line " + std::to_string(lineno) + ": empty key");
        HOLMES_REQUIRE(kv.emplace(key, value).second, InvalidArgument, "duplicate key '" + key + "'");
    }
    return kv;
}

std::map<std::string, std::string> read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    HOLMES_REQUIRE(in.good(), InvalidArgument, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str());
}

}  // namespace holmes
