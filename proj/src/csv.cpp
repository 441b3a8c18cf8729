#include "pisco/csv.hpp"

#include <fstream>
#include <sstream>

#include "pisco/errors.hpp"

namespace pisco::csv {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

int Document::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

Document read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV: " + path.string());
    Document doc;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    doc.header = split_line(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        doc.rows.push_back(split_line(line));
    }
    return doc;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write: " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace pisco::csv
