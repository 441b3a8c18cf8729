// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Each criterion pins its tolerances in code; time budgets
// are part of the criteria and are enforced.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "pisco/csv.hpp"
#include "pisco/engine.hpp"
#include "pisco/errors.hpp"
#include "pisco/harness.hpp"
#include "pisco/kernels.hpp"

using namespace pisco;
namespace fs = std::filesystem;

namespace {

struct Result {
    bool pass = false;
    std::string detail;
};

struct Failure {
    std::string detail;
    explicit Failure(std::string d) : detail(std::move(d)) {}
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

fs::path scratch_dir(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("pisco_acceptance_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

Batch full_batch(std::int64_t s) {
    Batch b;
    b.idx.resize(s);
    std::iota(b.idx.begin(), b.idx.end(), 0);
    return b;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

// Shared small heterogeneous logistic workload (agents=10, ring topology).
struct LogisticBench {
    PartitionedDataset parts;
    ModelOracle oracle;
    MixingMatrix mixing;
    double lambda_w;
};

LogisticBench logistic_bench(std::int64_t m, std::int64_t d, std::uint64_t data_seed) {
    LogisticBench b;
    b.parts = synth_logistic(10, m, d, 2.0, data_seed);
    b.oracle = ModelOracle::logistic(d, 0.01);
    b.mixing = metropolis_weights(build_topology(Topology::ring, 10, std::nullopt, 0));
    b.lambda_w = b.mixing.lambda_w;
    return b;
}

ExperimentSpec small_synth_spec(const fs::path& out, std::int64_t m, std::int64_t d) {
    ExperimentSpec spec;
    spec.workload.kind = "logistic";
    spec.workload.synthetic = true;
    spec.workload.samples_per_agent = m;
    spec.workload.dim = d;
    spec.workload.shift = 2.0;
    spec.workload.data_seed = 777;
    spec.topology.kind = "ring";
    spec.topology.n = 10;
    spec.out_dir = out.string();
    spec.workers = 2;
    return spec;
}

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

// 1. Tracking identity at every round and every local step.
Result crit_tracking_identity() {
    const LogisticBench bench = logistic_bench(200, 20, 777);
    double worst = 0.0;
    for (const int To : {1, 5}) {
        for (const double p : {0.0, 0.1, 1.0}) {
            const CommPolicy policy = CommPolicy::make(bench.mixing, p);
            const StepSizePlan plan = plan_step_sizes(
                1.0, p, policy.lambda_p, logistic_smoothness(bench.parts, 0.01), To, 0.0, 16, 10,
                50, 1.0);
            RunConfig cfg{p, To, plan.eta_l, plan.eta_c, 16, 50, 4242};
            NetworkState st =
                init_state(std::vector<double>(20, 0.0), bench.oracle, bench.parts, cfg);
            for (int k = 0; k < 50; ++k) {
                const RoundOutcome out =
                    staged_round(st, bench.oracle, bench.parts, bench.mixing, cfg);
                worst = std::max(worst, out.max_tracking_ratio);
                const MetricsRow row = metrics_snapshot(st, bench.oracle, bench.parts, nullptr);
                const std::vector<double> gbar = st.G.row_mean();
                const double scale =
                    std::sqrt(10.0 * kernels::sumsq(gbar.data(), gbar.size()));
                worst = std::max(worst, row.tracking_residual / (1.0 + scale));
            }
        }
    }
    require(worst <= 1e-9, "tracking ratio " + num(worst) + " exceeds 1e-9");
    return {true, "max ||Ybar-Gbar||_F/(1+||Gbar||_F) = " + num(worst)};
}

// 2. Staged rounds and the one-shot compact rewriting coincide.
Result crit_staged_equals_compact() {
    const LogisticBench bench = logistic_bench(200, 20, 777);
    double worst = 0.0;
    for (const int To : {1, 2, 5}) {
        RunConfig cfg{0.1, To, 0.02, 0.9, 16, 20, 99};
        NetworkState staged =
            init_state(std::vector<double>(20, 0.0), bench.oracle, bench.parts, cfg);
        NetworkState compact = staged;
        for (int k = 0; k < 20; ++k) {
            const CommDraw draw =
                draw_comm_matrix(cfg.p, bench.mixing, cfg.seed, compact.round);
            staged_round(staged, bench.oracle, bench.parts, bench.mixing, cfg);
            compact_round(compact, bench.oracle, bench.parts, draw, cfg);
            worst = std::max(worst, max_abs_diff(staged.X, compact.X));
            worst = std::max(worst, max_abs_diff(staged.Y, compact.Y));
        }
    }
    require(worst <= 1e-8, "trajectory difference " + num(worst) + " exceeds 1e-8");
    return {true, "max |staged - compact| = " + num(worst)};
}

// 3. Spectral quantities against closed forms; mixing-rate identity grid.
Result crit_spectral() {
    const MixingMatrix ring =
        metropolis_weights(build_topology(Topology::ring, 10, std::nullopt, 0));
    const double lam = (1.0 + 2.0 * std::cos(std::numbers::pi / 5.0)) / 3.0;
    const double closed = 1.0 - lam * lam;
    require(std::abs(ring.lambda_w - closed) <= 1e-10,
            "ring-10 lambda_w " + num(ring.lambda_w) + " vs closed form " + num(closed));

    const MixingMatrix complete =
        metropolis_weights(build_topology(Topology::complete, 10, std::nullopt, 0));
    require(std::abs(complete.lambda_w - 1.0) <= 1e-12,
            "complete-graph lambda_w = " + num(complete.lambda_w));

    Graph pairs;
    pairs.n = 4;
    pairs.edges = {{0, 1}, {2, 3}};
    const MixingMatrix two = metropolis_weights(pairs);
    require(std::abs(two.lambda_w) <= 1e-10,
            "two-component lambda_w = " + num(two.lambda_w));

    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const double lw = i / 10.0, p = j / 10.0;
            worst = std::max(worst,
                             std::abs(expected_mixing_rate(lw, p) - (lw + p * (1.0 - lw))));
        }
    }
    require(worst <= 1e-12, "lambda_p identity off by " + num(worst));
    return {true, "ring lambda_w = " + num(ring.lambda_w) + ", identity grid max err = " +
                      num(worst)};
}

// 4. Gradient oracles against central finite differences.
Result crit_gradient_oracles() {
    auto fd = [](const ModelOracle& oracle, std::vector<double> x, const Dataset& data,
                 const Batch& batch, std::int64_t coord) {
        std::vector<double> g(oracle.dim);
        const double h = 1e-6;
        x[coord] += h;
        const double fp = loss_grad(oracle, x, data, batch, g);
        x[coord] -= 2 * h;
        const double fm = loss_grad(oracle, x, data, batch, g);
        return (fp - fm) / (2 * h);
    };

    // logistic, rho = 0.01, 20 random points
    const PartitionedDataset parts = synth_logistic(1, 40, 12, 1.0, 5);
    const Dataset& data = parts.parts[0];
    const ModelOracle lo = ModelOracle::logistic(12, 0.01);
    const Batch lb = full_batch(data.s);
    RngStream r = RngStream::keyed(61, StreamPurpose::generic);
    double worst_lo = 0.0;
    std::vector<double> grad(lo.dim);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> x(lo.dim);
        for (auto& v : x) v = r.normal();
        loss_grad(lo, x, data, lb, grad);
        const std::int64_t coord = static_cast<std::int64_t>(r.below(12));
        const double f = fd(lo, x, data, lb, coord);
        worst_lo = std::max(worst_lo, std::abs(f - grad[coord]) /
                                          std::max({1e-8, std::abs(f), std::abs(grad[coord])}));
    }
    require(worst_lo < 1e-5, "logistic FD relative error " + num(worst_lo));

    // mlp 784-32-10, 50 random coordinates
    const ModelOracle mo = ModelOracle::mlp(784, 32, 10);
    Dataset md;
    md.s = 6;
    md.d = 784;
    md.binary = false;
    md.n_classes = 10;
    md.features.resize(6 * 784);
    md.labels.resize(6);
    RngStream dr = RngStream::keyed(62, StreamPurpose::generic);
    for (auto& v : md.features) v = dr.normal();
    for (auto& y : md.labels) y = static_cast<int>(dr.below(10));
    std::vector<double> xm = init_params(mo, 7);
    for (auto& v : xm) v += 0.01 * dr.normal();
    const Batch mb = full_batch(6);
    std::vector<double> gm(mo.dim);
    loss_grad(mo, xm, md, mb, gm);
    double worst_mlp = 0.0;
    for (int t = 0; t < 50; ++t) {
        const std::int64_t coord =
            static_cast<std::int64_t>(dr.below(static_cast<std::uint64_t>(mo.dim)));
        const double f = fd(mo, xm, md, mb, coord);
        worst_mlp = std::max(worst_mlp, std::abs(f - gm[coord]) /
                                            std::max({1e-6, std::abs(f), std::abs(gm[coord])}));
    }
    require(worst_mlp < 1e-4, "mlp FD relative error " + num(worst_mlp));
    return {true, "FD rel err: logistic " + num(worst_lo) + ", mlp " + num(worst_mlp)};
}

// 5. p = 1: exact consensus collapse; xbar follows a single node (full batch).
Result crit_consensus_collapse() {
    const LogisticBench bench = logistic_bench(200, 20, 777);
    {
        RunConfig cfg{1.0, 3, 0.02, 0.8, 16, 50, 11};
        NetworkState st =
            init_state(std::vector<double>(20, 0.0), bench.oracle, bench.parts, cfg);
        for (int k = 0; k < 50; ++k) {
            staged_round(st, bench.oracle, bench.parts, bench.mixing, cfg);
            const MetricsRow row = metrics_snapshot(st, bench.oracle, bench.parts, nullptr);
            require(row.consensus_err <= 1e-12 * st.X.frob_sq(),
                    "round " + std::to_string(k) + " consensus error " + num(row.consensus_err));
        }
    }
    // full batch, T_o = 1: after the first exact averaging, xbar is a
    // single-node gradient-tracking trajectory on the union dataset
    const std::int64_t m = 200;
    RunConfig cfg{1.0, 1, 0.01, 1.0, m, 30, 13};
    NetworkState st = init_state(std::vector<double>(20, 0.0), bench.oracle, bench.parts, cfg);
    staged_round(st, bench.oracle, bench.parts, bench.mixing, cfg);

    PartitionedDataset single;
    single.parts.push_back(concat_parts(bench.parts));
    const Batch full = full_batch(single.parts[0].s);
    const std::int64_t d = 20;
    std::vector<double> x = st.X.row_mean(), y(d), g(d), gn(d), xl(d), gl(d), yl(d);
    loss_grad(bench.oracle, x, single.parts[0], full, g);
    y = g;
    double worst = 0.0;
    for (int k = 0; k < 30; ++k) {
        staged_round(st, bench.oracle, bench.parts, bench.mixing, cfg);
        for (std::int64_t i = 0; i < d; ++i) xl[i] = x[i] - cfg.eta_l * y[i];
        loss_grad(bench.oracle, xl, single.parts[0], full, gl);
        for (std::int64_t i = 0; i < d; ++i) yl[i] = y[i] + gl[i] - g[i];
        for (std::int64_t i = 0; i < d; ++i)
            x[i] = (1 - cfg.eta_c) * x[i] + cfg.eta_c * (xl[i] - cfg.eta_l * yl[i]);
        loss_grad(bench.oracle, x, single.parts[0], full, gn);
        for (std::int64_t i = 0; i < d; ++i) y[i] = yl[i] + gn[i] - gl[i];
        g = gn;
        const std::vector<double> xbar = st.X.row_mean();
        for (std::int64_t i = 0; i < d; ++i)
            worst = std::max(worst, std::abs(xbar[i] - x[i]) / (1.0 + std::abs(x[i])));
    }
    require(worst <= 1e-10, "single-node trajectory deviation " + num(worst));
    return {true, "single-node deviation " + num(worst)};
}

// 6. Desk-scale convergence with the planned step sizes, alpha = 1.
Result crit_convergence_planned() {
    const LogisticBench bench = logistic_bench(200, 20, 777);
    const double L = logistic_smoothness(bench.parts, 0.01);
    const CommPolicy policy = CommPolicy::make(bench.mixing, 0.1);
    const StepSizePlan plan =
        plan_step_sizes(1.0, 0.1, policy.lambda_p, L, 5, 0.0, 200, 10, 3000, 1.0);
    RunConfig cfg{0.1, 5, plan.eta_l, plan.eta_c, 200, 3000, 1};

    NetworkState st = init_state(std::vector<double>(20, 0.0), bench.oracle, bench.parts, cfg);
    MetricsRow row = metrics_snapshot(st, bench.oracle, bench.parts, nullptr);
    const double g0 = row.grad_norm_sq;
    double sum = g0, best_avg = g0, last_inst = g0;
    std::int64_t crossed_at = -1;
    for (std::int64_t k = 0; k < 3000; ++k) {
        staged_round(st, bench.oracle, bench.parts, bench.mixing, cfg);
        row = metrics_snapshot(st, bench.oracle, bench.parts, nullptr);
        sum += row.grad_norm_sq;
        last_inst = row.grad_norm_sq;
        const double avg = sum / static_cast<double>(k + 2);
        best_avg = std::min(best_avg, avg);
        if (avg <= 1e-6 && crossed_at < 0) {
            crossed_at = k + 1;
            break;
        }
    }
    const std::string detail = "eta=" + num(cfg.eta()) + " g0=" + num(g0) + " floor g0/3001=" +
                               num(g0 / 3001.0) + " best running avg=" + num(best_avg) +
                               " last inst=" + num(last_inst);
    require(crossed_at >= 0,
            "running average never reached 1e-6 (" + detail +
                "); unattainable: the running average cannot drop below g0/(K+1), and the "
                "guarantee-driven step eta leaves the iterate nearly unchanged in 3000 rounds");
    return {true, "crossed at round " + std::to_string(crossed_at) + " (" + detail + ")"};
}

// 7. Local-update speedup at fixed eta: T_o = 10 needs <= 0.7x the rounds of T_o = 1.
Result crit_local_update_speedup() {
    const fs::path out = scratch_dir("crit7");
    ExperimentSpec spec = small_synth_spec(out, 50, 10);
    spec.grid.p = {0.1};
    spec.grid.local_updates = {1, 10};
    spec.grid.seeds = {1, 2, 3};
    spec.run.rounds = 200000;
    spec.run.batch = 0;  // full batch
    spec.run.eta_c = 1.0;
    spec.run.eta_l = 0.02;  // fixed eta = eta_c * eta_l across both cells
    spec.stopping.train_grad_threshold = 1e-4;
    spec.stopping.early_stop = true;

    const std::vector<RunRecord> records = run_experiment(spec);
    double mean1 = 0.0, mean10 = 0.0;
    int c1 = 0, c10 = 0;
    for (const RunRecord& r : records) {
        require(r.rounds_to_train_threshold.has_value(),
                "a run never reached the 1e-4 running-average threshold");
        if (r.T_o == 1) {
            mean1 += static_cast<double>(*r.rounds_to_train_threshold);
            ++c1;
        } else {
            mean10 += static_cast<double>(*r.rounds_to_train_threshold);
            ++c10;
        }
    }
    mean1 /= c1;
    mean10 /= c10;
    const double ratio = mean10 / mean1;
    require(ratio <= 0.7, "speedup ratio " + num(ratio) + " exceeds 0.7");
    return {true, "rounds T_o=1: " + num(mean1) + ", T_o=10: " + num(mean10) +
                      ", ratio = " + num(ratio)};
}

// 8. Probability sweep trend: more server access, fewer rounds to threshold.
Result crit_probability_sweep() {
    const double lambda_w =
        metropolis_weights(build_topology(Topology::ring, 10, std::nullopt, 0)).lambda_w;
    auto mean_rounds = [&](double p, const fs::path& out) {
        ExperimentSpec spec = small_synth_spec(out, 50, 10);
        spec.grid.p = {p};
        spec.grid.local_updates = {1};
        spec.grid.seeds = {1, 2, 3, 4, 5};
        spec.run.rounds = 120000;
        spec.run.batch = 0;
        spec.run.eta_c = 1.0;
        // guarantee-shaped scaling: eta proportional to the expected mixing rate
        spec.run.eta_l = 0.3 * expected_mixing_rate(lambda_w, p);
        spec.stopping.train_grad_threshold = 1e-4;
        const std::vector<RunRecord> records = run_experiment(spec);
        double mean = 0.0;
        for (const RunRecord& r : records) {
            require(r.rounds_to_train_threshold.has_value(),
                    "p=" + num(p) + " run never reached the threshold");
            mean += static_cast<double>(*r.rounds_to_train_threshold);
        }
        return mean / static_cast<double>(records.size());
    };
    const double r0 = mean_rounds(0.0, scratch_dir("crit8_p0"));
    const double r01 = mean_rounds(0.1, scratch_dir("crit8_p01"));
    const double r1 = mean_rounds(1.0, scratch_dir("crit8_p1"));
    require(r01 < r0, "rounds(p=0.1) = " + num(r01) + " not below rounds(p=0) = " + num(r0));
    require(r1 <= 1.1 * r01,
            "rounds(p=1) = " + num(r1) + " above 1.1 x rounds(p=0.1) = " + num(1.1 * r01));
    return {true, "mean rounds p=0: " + num(r0) + ", p=0.1: " + num(r01) + ", p=1: " + num(r1)};
}

// 9. Disconnected graph with server fallback: neural net still trains.
Result crit_disconnected_mlp() {
    // find a disconnected ER(10, 0.1) instance
    std::uint64_t er_seed = 0;
    Graph graph;
    for (std::uint64_t s = 1; s <= 200; ++s) {
        graph = build_topology(Topology::erdos_renyi, 10, 0.1, s);
        if (graph.component_count() > 1) {
            const MixingMatrix mm = metropolis_weights(graph);
            if (mm.lambda_w <= 1e-12) {
                er_seed = s;
                break;
            }
        }
    }
    require(er_seed != 0, "no disconnected ER(10,0.1) instance found in 200 seeds");

    const double p9 = std::pow(10.0, -0.5);
    const fs::path out = scratch_dir("crit9");
    ExperimentSpec spec;
    spec.workload.kind = "mlp";
    spec.workload.synthetic = true;
    spec.workload.samples_per_agent = 200;
    spec.workload.dim = 64;
    spec.workload.classes = 4;
    spec.workload.hidden = 16;
    spec.workload.shift = 1.0;
    spec.workload.data_seed = 99;
    spec.topology.kind = "erdos_renyi";
    spec.topology.n = 10;
    spec.topology.param = 0.1;
    spec.topology.seed = er_seed;
    spec.grid.p = {p9};
    spec.grid.local_updates = {10};
    spec.grid.seeds = {3};
    spec.run.rounds = 600;
    spec.run.batch = 0;
    spec.run.eta_c = 1.0;
    spec.run.eta_l = 0.02;
    spec.out_dir = out.string();

    const std::vector<RunRecord> records = run_experiment(spec);
    const std::vector<MetricsRow>& rows = records[0].rows;
    for (const MetricsRow& r : rows)
        require(std::isfinite(r.train_loss) && std::isfinite(r.grad_norm_sq),
                "non-finite metric at round " + std::to_string(r.round));
    const double init_loss = rows.front().train_loss;
    const double final_loss = rows.back().train_loss;
    require(final_loss < 0.5 * init_loss,
            "final loss " + num(final_loss) + " not below half of " + num(init_loss));
    std::vector<double> windows;
    for (std::size_t start = 0; start + 100 <= rows.size(); start += 100) {
        double w = 0.0;
        for (std::size_t i = start; i < start + 100; ++i) w += rows[i].train_loss;
        windows.push_back(w / 100.0);
    }
    for (std::size_t i = 1; i < windows.size(); ++i)
        require(windows[i] < windows[i - 1],
                "window " + std::to_string(i) + " mean loss did not decrease");

    // validate flags the p = 0 cell on the disconnected graph
    ExperimentSpec vspec = spec;
    vspec.grid.p = {0.0, p9};
    const ValidateReport rep = validate(vspec);
    require(std::abs(rep.lambda_w) <= 1e-12, "expected lambda_w = 0, got " + num(rep.lambda_w));
    bool flagged = false;
    for (const ValidateCell& c : rep.cells)
        if (c.p == 0.0 && !c.assumption_ok) flagged = true;
    require(flagged && !rep.warnings.empty(), "validate did not flag the p=0 cell");

    // ... and the p = 0 cell still runs without NaN under explicit steps
    ExperimentSpec zspec = spec;
    zspec.grid.p = {0.0};
    zspec.run.rounds = 200;
    zspec.out_dir = scratch_dir("crit9_p0").string();
    const std::vector<RunRecord> zrec = run_experiment(zspec);
    for (const MetricsRow& r : zrec[0].rows)
        require(std::isfinite(r.train_loss) && std::isfinite(r.grad_norm_sq) &&
                    std::isfinite(r.consensus_err),
                "p=0 cell produced non-finite values at round " + std::to_string(r.round));

    return {true, "ER seed " + std::to_string(er_seed) + ": loss " + num(init_loss) + " -> " +
                      num(final_loss) + " over 600 rounds, " +
                      std::to_string(windows.size()) + " windows monotone; p=0 cell finite"};
}

// 10. Benchmark-file parsers (skip cleanly when the files are absent).
Result crit_parsers() {
    std::string detail;
    bool any_present = false;

    const fs::path a9a = "data/a9a";
    if (fs::exists(a9a)) {
        any_present = true;
        std::ifstream in(a9a);
        const Dataset ds = parse_libsvm(in, 0, true);
        require(ds.s == 32561, "a9a sample count " + std::to_string(ds.s));
        require(ds.d == 124, "a9a dimension " + std::to_string(ds.d));
        const PartitionedDataset parts = partition_sorted(ds, 10);
        require(parts.part_size() == 3256, "a9a part size");
        int pure_neg = 0, pure_pos = 0;
        for (const Dataset& part : parts.parts) {
            const bool all_neg =
                std::all_of(part.labels.begin(), part.labels.end(), [](int y) { return y == -1; });
            const bool all_pos =
                std::all_of(part.labels.begin(), part.labels.end(), [](int y) { return y == 1; });
            pure_neg += all_neg;
            pure_pos += all_pos;
        }
        require(pure_neg == 5 && pure_pos == 5,
                "expected 5 pure agents per label, got " + std::to_string(pure_neg) + "/" +
                    std::to_string(pure_pos));
        detail += "a9a: 32561x124, 10x3256 partition verified. ";
    } else {
        detail += "dataset not present: data/a9a (skipped). ";
    }

    const fs::path mnist_img = "data/train-images-idx3-ubyte";
    const fs::path mnist_lab = "data/train-labels-idx1-ubyte";
    if (fs::exists(mnist_img) && fs::exists(mnist_lab)) {
        any_present = true;
        std::ifstream img(mnist_img, std::ios::binary), lab(mnist_lab, std::ios::binary);
        const Dataset ds = parse_idx(img, lab, true);
        require(ds.s == 60000, "mnist sample count " + std::to_string(ds.s));
        require(ds.d == 784, "mnist dimension " + std::to_string(ds.d));
        detail += "mnist: 60000x784 verified.";
    } else {
        detail += "dataset not present: data/train-images-idx3-ubyte (skipped).";
    }
    (void)any_present;
    return {true, detail};
}

// 11. Bytewise determinism of the experiment harness.
Result crit_determinism() {
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };
    const fs::path out1 = scratch_dir("crit11_a"), out2 = scratch_dir("crit11_b");
    for (const fs::path& out : {out1, out2}) {
        ExperimentSpec spec = small_synth_spec(out, 30, 6);
        spec.grid.p = {0.0, 0.5, 1.0};
        spec.grid.local_updates = {1, 2};
        spec.grid.seeds = {1, 2};
        spec.run.rounds = 30;
        spec.run.batch = 8;
        spec.run.eta_l = 0.02;
        spec.run.eta_c = 0.8;
        run_experiment(spec);
    }
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(out1)) {
        const fs::path other = out2 / entry.path().filename();
        require(fs::exists(other), "missing counterpart for " + entry.path().filename().string());
        require(slurp(entry.path()) == slurp(other),
                entry.path().filename().string() + " differs between reruns");
        ++compared;
    }
    require(compared >= 12, "expected at least 12 files, compared " + std::to_string(compared));
    return {true, std::to_string(compared) + " files bytewise identical across reruns"};
}

struct Criterion {
    int id;
    const char* name;
    double budget_sec;
    std::function<Result()> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "tracking identity at rounds and local steps", 10, crit_tracking_identity},
        {2, "staged rounds equal compact rounds", 10, crit_staged_equals_compact},
        {3, "spectral correctness", 10, crit_spectral},
        {4, "gradient oracles vs finite differences", 30, crit_gradient_oracles},
        {5, "consensus collapse at p=1", 30, crit_consensus_collapse},
        {6, "desk-scale convergence, planned steps", 60, crit_convergence_planned},
        {7, "local-update speedup at fixed eta", 120, crit_local_update_speedup},
        {8, "probability sweep trend", 180, crit_probability_sweep},
        {9, "disconnected-graph robustness (mlp)", 180, crit_disconnected_mlp},
        {10, "benchmark parsers", 10, crit_parsers},
        {11, "bytewise determinism", 60, crit_determinism},
    };

    std::printf("acceptance suite (kernels backend: %s)\n",
                std::string(kernels::backend_name()).c_str());
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Result res;
        try {
            res = c.body();
        } catch (const Failure& f) {
            res = {false, f.detail};
        } catch (const std::exception& e) {
            res = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (res.pass && elapsed > c.budget_sec) {
            res.pass = false;
            res.detail += " [exceeded " + num(c.budget_sec) + "s budget]";
        }
        std::printf("[%2d] %s  %-46s (%.1fs)  %s\n", c.id, res.pass ? "PASS" : "FAIL", c.name,
                    elapsed, res.detail.c_str());
        std::fflush(stdout);
        if (!res.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures;
}
