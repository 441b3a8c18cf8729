#include "pisco/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pisco/errors.hpp"
#include "pisco/rng.hpp"

namespace pisco {

Topology topology_from_string(const std::string& s) {
    if (s == "ring") return Topology::ring;
    if (s == "path") return Topology::path;
    if (s == "complete") return Topology::complete;
    if (s == "erdos_renyi") return Topology::erdos_renyi;
    if (s == "custom") return Topology::custom;
    throw ConfigError("unsupported topology: " + s);
}

std::string to_string(Topology t) {
    switch (t) {
        case Topology::ring: return "ring";
        case Topology::path: return "path";
        case Topology::complete: return "complete";
        case Topology::erdos_renyi: return "erdos_renyi";
        case Topology::custom: return "custom";
    }
    return "custom";
}

std::vector<int> Graph::degrees() const {
    std::vector<int> deg(n, 0);
    for (const auto& [i, j] : edges) {
        ++deg[i];
        ++deg[j];
    }
    return deg;
}

bool Graph::has_edge(int i, int j) const {
    if (i > j) std::swap(i, j);
    return std::find(edges.begin(), edges.end(), std::make_pair(i, j)) != edges.end();
}

int Graph::component_count() const {
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& [i, j] : edges) parent[find(i)] = find(j);
    int c = 0;
    for (int i = 0; i < n; ++i)
        if (find(i) == i) ++c;
    return c;
}

Graph build_topology(Topology kind, int n, std::optional<double> param, std::uint64_t seed) {
    if (n < 2) throw ConfigError("topology needs at least 2 agents, got " + std::to_string(n));
    Graph g;
    g.n = n;
    g.kind = kind;
    switch (kind) {
        case Topology::ring:
            for (int i = 0; i < n; ++i) {
                const int j = (i + 1) % n;
                g.edges.emplace_back(std::min(i, j), std::max(i, j));
            }
            if (n == 2) g.edges.pop_back();  // {0,1} would repeat
            break;
        case Topology::path:
            for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
            break;
        case Topology::complete:
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) g.edges.emplace_back(i, j);
            break;
        case Topology::erdos_renyi: {
            if (!param || *param < 0.0 || *param > 1.0)
                throw ConfigError("erdos_renyi needs an edge probability in [0,1]");
            RngStream stream = RngStream::keyed(seed, StreamPurpose::synth_data,
                                               /*round=*/0, /*agent=*/0, /*step=*/1);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (stream.next_double() < *param) g.edges.emplace_back(i, j);
            break;
        }
        case Topology::custom:
            throw ConfigError("custom topologies are supplied as explicit edges, not built");
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

MixingMatrix metropolis_weights(const Graph& g) {
    const std::vector<int> deg = g.degrees();
    Matrix w(g.n, g.n, 0.0);
    for (const auto& [i, j] : g.edges) {
        const double v = 1.0 / (1.0 + std::max(deg[i], deg[j]));
        w(i, j) = v;
        w(j, i) = v;
    }
    for (int i = 0; i < g.n; ++i) {
        double off = 0.0;
        for (int j = 0; j < g.n; ++j)
            if (j != i) off += w(i, j);
        w(i, i) = 1.0 - off;
    }
    MixingMatrix mm;
    mm.n = g.n;
    const auto [ls, lw] = spectral_gap(w);
    mm.w = std::move(w);
    mm.lambda_second = ls;
    mm.lambda_w = lw;
    return mm;
}

namespace {

void check_doubly_stochastic(const Matrix& w, double tol, const char* what) {
    const std::size_t n = w.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double rs = 0.0, cs = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (w(i, j) < -tol)
                throw StochasticityError(std::string(what) + ": negative entry at (" +
                                         std::to_string(i) + "," + std::to_string(j) + ")");
            rs += w(i, j);
            cs += w(j, i);
        }
        if (std::abs(rs - 1.0) > tol)
            throw StochasticityError(std::string(what) + ": row " + std::to_string(i) +
                                     " sums to " + std::to_string(rs));
        if (std::abs(cs - 1.0) > tol)
            throw StochasticityError(std::string(what) + ": column " + std::to_string(i) +
                                     " sums to " + std::to_string(cs));
    }
}

}  // namespace

std::pair<double, double> spectral_gap(const Matrix& w) {
    if (w.rows() != w.cols()) throw StochasticityError("mixing matrix must be square");
    check_doubly_stochastic(w, 1e-10, "spectral_gap");

    const std::size_t n = w.rows();
    // M = W - J; power iteration on M M^T. The start vector comes from a
    // fixed internal stream so spectral outputs are reproducible bit-for-bit.
    Matrix m = w;
    const double jval = 1.0 / static_cast<double>(n);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r) m(r, c) -= jval;

    RngStream stream = RngStream::keyed(0x9d15c0u, StreamPurpose::spectral);
    std::vector<double> v(n), tmp(n), mv(n);
    for (auto& x : v) x = stream.next_double() - 0.5;
    double vn = std::sqrt(kernels::sumsq(v.data(), n));
    for (auto& x : v) x /= vn;

    auto apply = [&](const std::vector<double>& in, std::vector<double>& out,
                     std::vector<double>& scratch) {
        // scratch = M^T in ; out = M scratch. Columns of m are contiguous.
        for (std::size_t c = 0; c < n; ++c) scratch[c] = kernels::dot(m.col(c), in.data(), n);
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t c = 0; c < n; ++c) kernels::axpy(scratch[c], m.col(c), out.data(), n);
    };

    double lambda_sq = 0.0;
    for (int it = 0; it < 100000; ++it) {
        apply(v, mv, tmp);
        const double next = std::sqrt(kernels::sumsq(mv.data(), n));
        if (next < 1e-300) {
            lambda_sq = 0.0;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) v[i] = mv[i] / next;
        if (std::abs(next - lambda_sq) <= 1e-12 * std::max(1.0, next)) {
            lambda_sq = next;
            break;
        }
        lambda_sq = next;
    }
    double lambda_second = std::sqrt(std::max(lambda_sq, 0.0));
    lambda_second = std::min(lambda_second, 1.0);
    const double lambda_w = std::min(std::max(1.0 - lambda_second * lambda_second, 0.0), 1.0);
    return {lambda_second, lambda_w};
}

double expected_mixing_rate(double lambda_w, double p) {
    if (lambda_w < 0.0 || lambda_w > 1.0)
        throw ConfigError("lambda_w out of [0,1]: " + std::to_string(lambda_w));
    if (p < 0.0 || p > 1.0) throw ConfigError("p out of [0,1]: " + std::to_string(p));
    return lambda_w + p * (1.0 - lambda_w);
}

MixingMatrix load_mixing_matrix(std::istream& in) { return load_mixing_matrix(in, Graph{}); }

MixingMatrix load_mixing_matrix(std::istream& in, const Graph& g) {
    std::string line;
    long lineno = 0;
    auto next_content_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            const auto pos = line.find_first_not_of(" \t\r");
            if (pos == std::string::npos) continue;
            if (line[pos] == '#') continue;
            return true;
        }
        return false;
    };

    if (!next_content_line()) throw ParseError("mixing matrix: empty input");
    int n = 0;
    {
        std::istringstream ss(line);
        if (!(ss >> n) || n <= 0)
            throw ParseError("mixing matrix: bad dimension line " + std::to_string(lineno));
    }
    Matrix w(n, n, 0.0);
    for (int r = 0; r < n; ++r) {
        if (!next_content_line())
            throw ParseError("mixing matrix: expected " + std::to_string(n) + " rows, got " +
                             std::to_string(r));
        std::istringstream ss(line);
        for (int c = 0; c < n; ++c) {
            double v;
            if (!(ss >> v))
                throw ParseError("mixing matrix: row " + std::to_string(r) + " (line " +
                                 std::to_string(lineno) + ") has fewer than " +
                                 std::to_string(n) + " entries");
            w(r, c) = v;
        }
        double extra;
        if (ss >> extra)
            throw ParseError("mixing matrix: row " + std::to_string(r) + " has extra entries");
    }

    check_doubly_stochastic(w, 1e-8, "mixing matrix");

    if (g.n > 0) {
        if (g.n != n)
            throw PatternError("mixing matrix is " + std::to_string(n) + "x" + std::to_string(n) +
                               " but graph has " + std::to_string(g.n) + " agents");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && w(i, j) != 0.0 && !g.has_edge(i, j))
                    throw PatternError("mixing matrix has weight on non-edge {" +
                                       std::to_string(i) + "," + std::to_string(j) + "}");
    }

    MixingMatrix mm;
    mm.n = n;
    const auto [ls, lw] = spectral_gap(w);
    mm.w = std::move(w);
    mm.lambda_second = ls;
    mm.lambda_w = lw;
    return mm;
}

MixingMatrix load_mixing_matrix(const std::filesystem::path& path, const Graph* g) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open mixing matrix file: " + path.string());
    return g ? load_mixing_matrix(in, *g) : load_mixing_matrix(in);
}

CommPolicy CommPolicy::make(const MixingMatrix& w, double p) {
    const double lp = expected_mixing_rate(w.lambda_w, p);
    if (lp <= 0.0)
        throw AssumptionError("expected mixing rate is zero (disconnected graph with p = 0)");
    return CommPolicy{p, lp};
}

}  // namespace pisco
