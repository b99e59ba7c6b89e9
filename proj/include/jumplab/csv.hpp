#pragma once

#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jumplab::csv {

/// Split one CSV line into fields. Handles RFC-4180 quoting: fields may be
/// wrapped in double quotes, embedded quotes are doubled. No multi-line fields.
inline std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') { cur += '"'; ++i; }
                else quoted = false;
            } else cur += c;
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

/// Quote a field if it contains a comma, quote, or newline.
inline std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline bool parse_double(std::string_view s, double& v) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_i64(std::string_view s, int64_t& v) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_u64(std::string_view s, uint64_t& v) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_int(std::string_view s, int& v) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size();
}

/// Iterate lines of a text buffer, tolerating \n and \r\n, skipping a final
/// empty line. Calls fn(line_number_starting_at_1, line_without_terminator).
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    size_t pos = 0, lineno = 0;
    while (pos < text.size()) {
        size_t nl = text.find('\n', pos);
        std::string_view line = (nl == std::string_view::npos)
                                    ? text.substr(pos)
                                    : text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++lineno;
        fn(lineno, line);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
}

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

/// Read a whole file into a string. Throws std::runtime_error on failure.
std::string read_file(const std::string& path);

/// Write a whole buffer to a file atomically-ish (truncate + write). Throws on failure.
void write_file(const std::string& path, std::string_view content);

} // namespace jumplab::csv
