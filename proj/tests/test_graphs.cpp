#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pisco/errors.hpp"
#include "pisco/graphs.hpp"
#include "pisco/rng.hpp"

using namespace pisco;

namespace {

// Every mixing matrix in these tests must be doubly stochastic to 1e-12 with
// nonnegative entries.
void check_doubly_stochastic(const Matrix& w) {
    const std::size_t n = w.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double rs = 0.0, cs = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(w(i, j) >= -1e-15);
            rs += w(i, j);
            cs += w(j, i);
        }
        CHECK(std::abs(rs - 1.0) <= 1e-12);
        CHECK(std::abs(cs - 1.0) <= 1e-12);
    }
}

Graph two_pairs() {
    Graph g;
    g.n = 4;
    g.edges = {{0, 1}, {2, 3}};
    g.kind = Topology::custom;
    return g;
}

}  // namespace

TEST_CASE("ring and complete topologies have the defining edge sets") {
    const Graph ring4 = build_topology(Topology::ring, 4, std::nullopt, 0);
    CHECK(ring4.edges == std::vector<std::pair<int, int>>{{0, 1}, {0, 3}, {1, 2}, {2, 3}});

    const Graph k3 = build_topology(Topology::complete, 3, std::nullopt, 0);
    CHECK(k3.edges.size() == 3);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) CHECK(k3.has_edge(i, j));

    const Graph path5 = build_topology(Topology::path, 5, std::nullopt, 0);
    CHECK(path5.edges.size() == 4);
    CHECK_FALSE(path5.has_edge(0, 4));  // no wrap edge

    CHECK_THROWS_AS(build_topology(Topology::ring, 1, std::nullopt, 0), ConfigError);
}

TEST_CASE("erdos-renyi generation is deterministic in the seed") {
    const Graph a = build_topology(Topology::erdos_renyi, 10, 0.3, 7);
    const Graph b = build_topology(Topology::erdos_renyi, 10, 0.3, 7);
    CHECK(a.edges == b.edges);
    const Graph c = build_topology(Topology::erdos_renyi, 10, 0.3, 8);
    CHECK(a.edges != c.edges);  // overwhelmingly likely for 45 candidate edges
    CHECK_THROWS_AS(build_topology(Topology::erdos_renyi, 10, std::nullopt, 7), ConfigError);
}

TEST_CASE("metropolis weights on the ring") {
    const Graph ring10 = build_topology(Topology::ring, 10, std::nullopt, 0);
    const MixingMatrix mm = metropolis_weights(ring10);
    check_doubly_stochastic(mm.w);
    // degree 2 everywhere: every edge weight and the diagonal are 1/3
    for (int i = 0; i < 10; ++i) {
        CHECK(mm.w(i, i) == doctest::Approx(1.0 / 3).epsilon(1e-15));
        CHECK(mm.w(i, (i + 1) % 10) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    }
    // off-pattern entries are exactly zero
    CHECK(mm.w(0, 2) == 0.0);
    CHECK(mm.w(3, 7) == 0.0);
}

TEST_CASE("metropolis on two agents is plain averaging") {
    const Graph k2 = build_topology(Topology::complete, 2, std::nullopt, 0);
    const MixingMatrix mm = metropolis_weights(k2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(mm.w(i, j) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("ring-10 spectral gap matches the circulant closed form") {
    const Graph ring10 = build_topology(Topology::ring, 10, std::nullopt, 0);
    const MixingMatrix mm = metropolis_weights(ring10);
    // Eigenvalues of the circulant weights are (1 + 2 cos(2 pi k / 10)) / 3;
    // the second-largest magnitude is at k = 1.
    const double lam = (1.0 + 2.0 * std::cos(std::numbers::pi / 5.0)) / 3.0;
    CHECK(std::abs(mm.lambda_second - lam) <= 1e-10);
    CHECK(std::abs(mm.lambda_w - (1.0 - lam * lam)) <= 1e-10);
    CHECK(std::abs(mm.lambda_w + mm.lambda_second * mm.lambda_second - 1.0) <= 1e-12);
}

TEST_CASE("complete graph mixes exactly; disconnected graphs do not mix") {
    const Graph kn = build_topology(Topology::complete, 6, std::nullopt, 0);
    const MixingMatrix mm = metropolis_weights(kn);
    CHECK(mm.lambda_second == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mm.lambda_w == doctest::Approx(1.0).epsilon(1e-12));

    const MixingMatrix dd = metropolis_weights(two_pairs());
    check_doubly_stochastic(dd.w);
    CHECK(dd.lambda_second == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(dd.lambda_w == doctest::Approx(0.0).epsilon(1e-10));
    // block-diagonal 2x2 averaging blocks
    CHECK(dd.w(0, 1) == doctest::Approx(0.5));
    CHECK(dd.w(2, 3) == doctest::Approx(0.5));
    CHECK(dd.w(0, 2) == 0.0);
}

TEST_CASE("isolated vertices keep their own value") {
    Graph g;
    g.n = 3;
    g.edges = {{0, 1}};
    const MixingMatrix mm = metropolis_weights(g);
    CHECK(mm.w(2, 2) == doctest::Approx(1.0));
    CHECK(mm.lambda_w == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("mixing contraction property holds for random vectors") {
    // || W x - xbar ||^2 <= (1 - lambda_w) || x - xbar ||^2
    const Graph ring10 = build_topology(Topology::ring, 10, std::nullopt, 0);
    const Graph er = build_topology(Topology::erdos_renyi, 12, 0.4, 3);
    for (const MixingMatrix& mm : {metropolis_weights(ring10), metropolis_weights(er),
                                   metropolis_weights(two_pairs())}) {
        const std::size_t n = mm.w.rows();
        RngStream s = RngStream::keyed(99, StreamPurpose::generic, n);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> x(n), wx(n, 0.0);
            for (auto& v : x) v = s.normal();
            double mean = 0.0;
            for (const double v : x) mean += v;
            mean /= static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) wx[i] += mm.w(i, j) * x[j];
            double lhs = 0.0, rhs = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                lhs += (wx[i] - mean) * (wx[i] - mean);
                rhs += (x[i] - mean) * (x[i] - mean);
            }
            CHECK(lhs <= (1.0 - mm.lambda_w) * rhs + 1e-9);
        }
    }
}

TEST_CASE("expected mixing rate formula and monotonicity") {
    CHECK(expected_mixing_rate(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(expected_mixing_rate(0.5, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(expected_mixing_rate(0.38, 0.1) == doctest::Approx(0.442).epsilon(1e-12));
    CHECK_THROWS_AS(expected_mixing_rate(-0.1, 0.5), ConfigError);
    CHECK_THROWS_AS(expected_mixing_rate(0.5, 1.5), ConfigError);

    double prev = -1.0;
    for (int i = 0; i <= 20; ++i) {  // nondecreasing in both arguments
        const double v = expected_mixing_rate(i / 20.0, 0.3);
        CHECK(v >= prev);
        prev = v;
    }
    prev = -1.0;
    for (int i = 0; i <= 20; ++i) {
        const double v = expected_mixing_rate(0.3, i / 20.0);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("comm policy rejects a dead network") {
    const MixingMatrix dd = metropolis_weights(two_pairs());
    CHECK_THROWS_AS(CommPolicy::make(dd, 0.0), AssumptionError);
    const CommPolicy ok = CommPolicy::make(dd, 0.25);
    CHECK(ok.lambda_p == doctest::Approx(0.25));
}

TEST_CASE("mixing matrix text format round trip") {
    std::istringstream good(
        "# averaging matrix\n"
        "3\n"
        "0.3333333333333333 0.3333333333333333 0.3333333333333334\n"
        "0.3333333333333333 0.3333333333333334 0.3333333333333333\n"
        "0.3333333333333334 0.3333333333333333 0.3333333333333333\n");
    const MixingMatrix mm = load_mixing_matrix(good);
    CHECK(mm.n == 3);
    CHECK(mm.lambda_w == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("mixing matrix loader rejects bad input distinctly") {
    std::istringstream bad_sum(
        "2\n"
        "0.5 0.4\n"
        "0.5 0.5\n");
    CHECK_THROWS_AS(load_mixing_matrix(bad_sum), StochasticityError);

    std::istringstream truncated("3\n0.5 0.5 0.0\n");
    CHECK_THROWS_AS(load_mixing_matrix(truncated), ParseError);

    std::istringstream garbage("2\n0.5 x\n0.5 0.5\n");
    CHECK_THROWS_AS(load_mixing_matrix(garbage), ParseError);

    std::istringstream empty("");
    CHECK_THROWS_AS(load_mixing_matrix(empty), ParseError);

    // weight on a non-edge of the ring
    const Graph ring4 = build_topology(Topology::ring, 4, std::nullopt, 0);
    std::istringstream off_pattern(
        "4\n"
        "0.25 0.25 0.25 0.25\n"
        "0.25 0.25 0.25 0.25\n"
        "0.25 0.25 0.25 0.25\n"
        "0.25 0.25 0.25 0.25\n");
    CHECK_THROWS_AS(load_mixing_matrix(off_pattern, ring4), PatternError);
}

TEST_CASE("loaded ring FDLA-style weights beat metropolis mixing") {
    // Optimal symmetric circulant for the 10-ring: equalize the k=1 and k=5
    // eigenvalue magnitudes of W - J.
    const double c1 = std::cos(2.0 * std::numbers::pi / 10.0);
    const double w1 = 2.0 / (4.0 + 2.0 * (1.0 - c1));
    const double w0 = 1.0 - 2.0 * w1;
    std::ostringstream file;
    file << "10\n";
    file.precision(17);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const int dist = std::min((i - j + 10) % 10, (j - i + 10) % 10);
            file << (dist == 0 ? w0 : (dist == 1 ? w1 : 0.0)) << ' ';
        }
        file << '\n';
    }
    const Graph ring10 = build_topology(Topology::ring, 10, std::nullopt, 0);
    std::istringstream in(file.str());
    const MixingMatrix fdla = load_mixing_matrix(in, ring10);
    const MixingMatrix metro = metropolis_weights(ring10);
    CHECK(fdla.lambda_w > metro.lambda_w);
    const double expect = 1.0 - std::pow(1.0 - 2.0 * w1 * (1.0 - c1), 2);
    CHECK(fdla.lambda_w == doctest::Approx(expect).epsilon(1e-9));
}
