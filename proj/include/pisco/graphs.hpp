#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pisco/matrix.hpp"

namespace pisco {

enum class Topology { ring, path, complete, erdos_renyi, custom };

Topology topology_from_string(const std::string& s);
std::string to_string(Topology t);

// Undirected communication graph on agents 0..n-1. Edges are stored with
// i < j; there are no self-loops.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    Topology kind = Topology::custom;

    std::vector<int> degrees() const;
    bool has_edge(int i, int j) const;
    int component_count() const;
};

// param is the edge probability for erdos_renyi (ignored otherwise); seed is
// consumed only by erdos_renyi. The result may be disconnected.
Graph build_topology(Topology kind, int n, std::optional<double> param, std::uint64_t seed);

// Doubly stochastic mixing weights plus the spectral quantities that govern
// gossip contraction: lambda_second = ||W - J||_2 and lambda_w = 1 - lambda_second^2.
struct MixingMatrix {
    int n = 0;
    Matrix w;  // n x n, column-major
    double lambda_second = 0.0;
    double lambda_w = 0.0;
};

// Metropolis-Hastings weights: w_ij = 1/(1 + max(deg_i, deg_j)) on edges,
// diagonal absorbs the remainder. Symmetric, hence doubly stochastic.
// Isolated vertices get w_ii = 1.
MixingMatrix metropolis_weights(const Graph& g);

// Largest singular value of W - J by power iteration on (W-J)(W-J)^T, with a
// deterministic start vector; relative tolerance 1e-12, at most 100000
// iterations. Throws ValidationError (as DataError) if w is not doubly
// stochastic within 1e-10.
std::pair<double, double> spectral_gap(const Matrix& w);

// lambda_p = lambda_w + p*(1 - lambda_w). Does not reject lambda_p == 0;
// callers that need the mixing contraction must check.
double expected_mixing_rate(double lambda_w, double p);

// Dense-matrix text format: first line "n", then n lines of n space-separated
// reals; lines beginning '#' are comments. Validated doubly stochastic within
// 1e-8 and, when a graph is given, compatible with its sparsity pattern.
MixingMatrix load_mixing_matrix(std::istream& in);
MixingMatrix load_mixing_matrix(std::istream& in, const Graph& g);
MixingMatrix load_mixing_matrix(const std::filesystem::path& path, const Graph* g = nullptr);

// Server-access probability paired with the expected mixing rate it induces.
// Construction requires lambda_p > 0 (lambda_w = 0 is admissible only with p > 0).
struct CommPolicy {
    double p = 0.0;
    double lambda_p = 0.0;

    static CommPolicy make(const MixingMatrix& w, double p);
};

}  // namespace pisco
