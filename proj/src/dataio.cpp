#include "pisco/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>
#include <string>

#include "pisco/errors.hpp"
#include "pisco/rng.hpp"

namespace pisco {

namespace {

struct SparseRow {
    double label = 0.0;
    std::vector<std::pair<std::int64_t, double>> entries;  // 1-based indices
};

SparseRow parse_libsvm_line(const std::string& line, long lineno) {
    SparseRow row;
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok))
        throw ParseError("libsvm: blank line " + std::to_string(lineno));
    try {
        std::size_t used = 0;
        row.label = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
        throw ParseError("libsvm: non-numeric label '" + tok + "' on line " +
                         std::to_string(lineno));
    }
    std::int64_t prev = 0;
    while (ss >> tok) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos)
            throw ParseError("libsvm: expected idx:val, got '" + tok + "' on line " +
                             std::to_string(lineno));
        std::int64_t idx;
        double val;
        try {
            std::size_t u1 = 0, u2 = 0;
            idx = std::stoll(tok.substr(0, colon), &u1);
            val = std::stod(tok.substr(colon + 1), &u2);
            if (u1 != colon || u2 != tok.size() - colon - 1) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError("libsvm: non-numeric token '" + tok + "' on line " +
                             std::to_string(lineno));
        }
        if (idx <= prev)
            throw ParseError("libsvm: non-ascending index " + std::to_string(idx) + " on line " +
                             std::to_string(lineno));
        prev = idx;
        row.entries.emplace_back(idx, val);
    }
    return row;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, std::int64_t d_hint, bool add_bias) {
    std::vector<SparseRow> rows;
    std::int64_t max_idx = 0;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        rows.push_back(parse_libsvm_line(line, lineno));
        if (!rows.back().entries.empty())
            max_idx = std::max(max_idx, rows.back().entries.back().first);
    }
    if (rows.empty()) throw ParseError("libsvm: empty file");

    const std::int64_t base = std::max(d_hint, max_idx);
    Dataset ds;
    ds.s = static_cast<std::int64_t>(rows.size());
    ds.d = base + (add_bias ? 1 : 0);
    ds.n_classes = 2;
    ds.binary = true;
    ds.features.assign(ds.s * ds.d, 0.0);
    ds.labels.resize(ds.s);
    for (std::int64_t i = 0; i < ds.s; ++i) {
        double* f = ds.sample(i);
        for (const auto& [idx, val] : rows[i].entries) f[idx - 1] = val;
        if (add_bias) f[base] = 1.0;
        ds.labels[i] = rows[i].label > 0.0 ? 1 : -1;
    }
    return ds;
}

namespace {

std::uint32_t read_be32(std::istream& in, const char* what) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4) throw ParseError(std::string("idx: truncated ") + what + " header");
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

Dataset parse_idx(std::istream& images, std::istream& labels, bool normalize) {
    const std::uint32_t img_magic = read_be32(images, "image");
    if (img_magic != 0x00000803u) {
        std::ostringstream os;
        os << "idx: image magic mismatch, got 0x" << std::hex << img_magic;
        throw ParseError(os.str());
    }
    const std::uint32_t count = read_be32(images, "image");
    const std::uint32_t rows = read_be32(images, "image");
    const std::uint32_t cols = read_be32(images, "image");

    const std::uint32_t lab_magic = read_be32(labels, "label");
    if (lab_magic != 0x00000801u) {
        std::ostringstream os;
        os << "idx: label magic mismatch, got 0x" << std::hex << lab_magic;
        throw ParseError(os.str());
    }
    const std::uint32_t lab_count = read_be32(labels, "label");
    if (lab_count != count)
        throw ParseError("idx: image count " + std::to_string(count) +
                         " != label count " + std::to_string(lab_count));

    const std::int64_t dim = std::int64_t(rows) * cols;
    Dataset ds;
    ds.s = count;
    ds.d = dim;
    ds.binary = false;
    ds.features.resize(std::size_t(count) * dim);
    ds.labels.resize(count);

    std::vector<unsigned char> buf(dim);
    for (std::uint32_t i = 0; i < count; ++i) {
        images.read(reinterpret_cast<char*>(buf.data()), dim);
        if (images.gcount() != dim)
            throw ParseError("idx: truncated image payload at sample " + std::to_string(i));
        double* f = ds.sample(i);
        const double scale = normalize ? 1.0 / 255.0 : 1.0;
        for (std::int64_t j = 0; j < dim; ++j) f[j] = buf[j] * scale;
    }
    if (images.peek() != std::char_traits<char>::eof())
        throw ParseError("idx: image payload longer than declared count");

    int max_label = 0;
    for (std::uint32_t i = 0; i < count; ++i) {
        const int c = labels.get();
        if (c == std::char_traits<char>::eof())
            throw ParseError("idx: truncated label payload at sample " + std::to_string(i));
        ds.labels[i] = c;
        max_label = std::max(max_label, c);
    }
    if (labels.peek() != std::char_traits<char>::eof())
        throw ParseError("idx: label payload longer than declared count");
    ds.n_classes = max_label + 1;
    return ds;
}

PartitionedDataset partition_sorted(const Dataset& data, int n) {
    if (n < 1 || data.s < n)
        throw DataError("cannot partition " + std::to_string(data.s) + " samples into " +
                        std::to_string(n) + " parts");
    std::vector<std::int64_t> order(data.s);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
        return data.labels[a] < data.labels[b];
    });

    const std::int64_t m = data.s / n;
    PartitionedDataset out;
    out.tag = Heterogeneity::sorted_by_label;
    out.parts.resize(n);
    for (int i = 0; i < n; ++i) {
        Dataset& part = out.parts[i];
        part.d = data.d;
        part.s = m;
        part.binary = data.binary;
        part.n_classes = data.n_classes;
        part.features.resize(m * data.d);
        part.labels.resize(m);
        for (std::int64_t r = 0; r < m; ++r) {
            const std::int64_t src = order[i * m + r];
            std::memcpy(part.sample(r), data.sample(src), sizeof(double) * data.d);
            part.labels[r] = data.labels[src];
        }
    }
    return out;
}

PartitionedDataset synth_logistic(int n_agents, std::int64_t m, std::int64_t d, double shift,
                                  std::uint64_t seed) {
    if (n_agents < 1 || m < 1 || d < 1)
        throw ConfigError("synth_logistic: all counts must be positive");

    RngStream truth = RngStream::keyed(seed, StreamPurpose::synth_data, 0, ~0ull, 0);
    std::vector<double> separator(d);
    for (auto& v : separator) v = truth.normal();

    PartitionedDataset out;
    out.tag = Heterogeneity::sorted_by_label;
    out.parts.resize(n_agents);
    for (int i = 0; i < n_agents; ++i) {
        RngStream stream = RngStream::keyed(seed, StreamPurpose::synth_data, 1, i, 0);
        std::vector<double> offset(d, 0.0);
        if (shift > 0.0) {
            double norm_sq = 0.0;
            for (auto& v : offset) {
                v = stream.normal();
                norm_sq += v * v;
            }
            const double scale = shift / std::sqrt(norm_sq);
            for (auto& v : offset) v *= scale;
        }
        Dataset& part = out.parts[i];
        part.s = m;
        part.d = d;
        part.binary = true;
        part.n_classes = 2;
        part.features.resize(m * d);
        part.labels.resize(m);
        for (std::int64_t r = 0; r < m; ++r) {
            double* f = part.sample(r);
            double margin = 0.0;
            for (std::int64_t j = 0; j < d; ++j) {
                f[j] = stream.normal() + offset[j];
                margin += f[j] * separator[j];
            }
            int y = margin >= 0.0 ? 1 : -1;
            if (stream.next_double() < 0.05) y = -y;
            part.labels[r] = y;
        }
    }
    return out;
}

PartitionedDataset synth_multiclass(int n_agents, std::int64_t m, std::int64_t d, int classes,
                                    double shift, std::uint64_t seed) {
    if (n_agents < 1 || m < 1 || d < 1 || classes < 2)
        throw ConfigError("synth_multiclass: all counts must be positive (classes >= 2)");

    RngStream proto_stream = RngStream::keyed(seed, StreamPurpose::synth_data, 2, ~0ull, 0);
    std::vector<double> prototypes(std::size_t(classes) * d);
    for (auto& v : prototypes) v = proto_stream.normal();

    PartitionedDataset out;
    out.tag = Heterogeneity::sorted_by_label;
    out.parts.resize(n_agents);
    for (int i = 0; i < n_agents; ++i) {
        RngStream stream = RngStream::keyed(seed, StreamPurpose::synth_data, 3, i, 0);
        const int cls = i % classes;
        const double* proto = prototypes.data() + std::size_t(cls) * d;
        std::vector<double> offset(d, 0.0);
        if (shift > 0.0) {
            double norm_sq = 0.0;
            for (auto& v : offset) {
                v = stream.normal();
                norm_sq += v * v;
            }
            const double scale = shift / std::sqrt(norm_sq);
            for (auto& v : offset) v *= scale;
        }
        Dataset& part = out.parts[i];
        part.s = m;
        part.d = d;
        part.binary = false;
        part.n_classes = classes;
        part.features.resize(m * d);
        part.labels.assign(m, cls);
        for (std::int64_t r = 0; r < m; ++r) {
            double* f = part.sample(r);
            for (std::int64_t j = 0; j < d; ++j) f[j] = proto[j] + stream.normal() + offset[j];
        }
    }
    return out;
}

Dataset concat_parts(const PartitionedDataset& parts) {
    Dataset out;
    if (parts.parts.empty()) return out;
    out.d = parts.dim();
    out.binary = parts.parts.front().binary;
    out.n_classes = parts.parts.front().n_classes;
    for (const Dataset& p : parts.parts) {
        out.s += p.s;
        out.features.insert(out.features.end(), p.features.begin(), p.features.end());
        out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    }
    return out;
}

}  // namespace pisco
