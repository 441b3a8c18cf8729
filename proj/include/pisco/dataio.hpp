#pragma once

#include <cstdint>
#include <istream>
#include <vector>

namespace pisco {

// Dense sample matrix (row-major, one sample per row) plus labels. Binary
// tasks use labels in {-1, +1}; multiclass tasks use class indices 0..C-1.
struct Dataset {
    std::int64_t s = 0;  // sample count
    std::int64_t d = 0;  // feature dimension
    int n_classes = 2;
    bool binary = true;
    std::vector<double> features;  // s * d
    std::vector<int> labels;       // length s

    const double* sample(std::int64_t i) const { return features.data() + i * d; }
    double* sample(std::int64_t i) { return features.data() + i * d; }
};

enum class Heterogeneity { sorted_by_label, shuffled };

// Equal-size per-agent splits; remainder samples are dropped.
struct PartitionedDataset {
    std::vector<Dataset> parts;
    Heterogeneity tag = Heterogeneity::sorted_by_label;

    int n() const { return static_cast<int>(parts.size()); }
    std::int64_t part_size() const { return parts.empty() ? 0 : parts.front().s; }
    std::int64_t dim() const { return parts.empty() ? 0 : parts.front().d; }
};

// LIBSVM text: "label idx:val idx:val ..." with 1-based ascending indices.
// Feature width is max(d_hint, largest index seen); add_bias appends a
// constant-1 feature. Labels <= 0 map to -1, positive to +1.
Dataset parse_libsvm(std::istream& in, std::int64_t d_hint = 0, bool add_bias = false);

// IDX big-endian pair: image magic 0x00000803 (count x rows x cols bytes),
// label magic 0x00000801. Counts must agree and payloads must be complete.
Dataset parse_idx(std::istream& images, std::istream& labels, bool normalize = true);

// Stable sort by label (ties keep source order), then split into n contiguous
// blocks of floor(s/n) samples each.
PartitionedDataset partition_sorted(const Dataset& data, int n);

// Heterogeneous synthetic binary task: agent i draws m standard-normal
// feature vectors shifted by a per-agent offset of norm `shift`; labels come
// from one fixed linear separator with 5% sign flips. Deterministic in seed.
PartitionedDataset synth_logistic(int n_agents, std::int64_t m, std::int64_t d, double shift,
                                  std::uint64_t seed);

// Multiclass analogue for the neural-net workload: agent i holds samples of
// class i mod `classes` only (class prototype + unit noise + per-agent offset).
PartitionedDataset synth_multiclass(int n_agents, std::int64_t m, std::int64_t d, int classes,
                                    double shift, std::uint64_t seed);

// Union of the parts, in part order (used by full-batch evaluation).
Dataset concat_parts(const PartitionedDataset& parts);

}  // namespace pisco
