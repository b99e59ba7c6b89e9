#include "jumplab/csv.hpp"

#include <charconv>
#include <cstdio>

#include "jumplab/errors.hpp"

namespace jumplab::csv {

std::string read_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw input_error("cannot open " + path);
    std::string out;
    char buf[1 << 16];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, n);
    bool err = std::ferror(f) != 0;
    std::fclose(f);
    if (err) throw input_error("read error on " + path);
    return out;
}

void write_file(const std::string& path, std::string_view content) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw input_error("cannot write " + path);
    size_t n = std::fwrite(content.data(), 1, content.size(), f);
    bool err = n != content.size() || std::fclose(f) != 0;
    if (err) throw input_error("write error on " + path);
}

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

} // namespace jumplab::csv
