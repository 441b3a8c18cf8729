#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace pisco::csv {

// 17 significant digits: enough to round-trip any double exactly.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_line(const std::string& line);

struct Document {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when absent
};

Document read(const std::filesystem::path& path);

// Writes via a temp file and rename so concurrent writers never interleave.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace pisco::csv
