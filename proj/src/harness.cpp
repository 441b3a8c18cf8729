#include "pisco/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "pisco/csv.hpp"
#include "pisco/errors.hpp"

namespace pisco {

namespace {

std::string fmt_g(double v, const char* f = "%.6g") {
    char buf[40];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Spec parsing / serialization
// ---------------------------------------------------------------------------

ExperimentSpec ExperimentSpec::from_toml(const toml::Table& t) {
    ExperimentSpec s;
    auto& w = s.workload;
    if (auto v = t.get_string("workload", "kind")) w.kind = *v;
    if (w.kind != "logistic" && w.kind != "mlp")
        throw ConfigError("[workload] kind must be 'logistic' or 'mlp', got '" + w.kind + "'");
    if (auto v = t.get_double("workload", "rho")) w.rho = *v;
    if (auto v = t.get_bool("workload", "synthetic")) w.synthetic = *v;
    if (auto v = t.get_int("workload", "samples_per_agent")) w.samples_per_agent = *v;
    if (auto v = t.get_int("workload", "dim")) w.dim = *v;
    if (auto v = t.get_double("workload", "shift")) w.shift = *v;
    if (auto v = t.get_int("workload", "classes")) w.classes = static_cast<int>(*v);
    if (auto v = t.get_int("workload", "hidden")) w.hidden = static_cast<int>(*v);
    if (auto v = t.get_int("workload", "data_seed")) w.data_seed = static_cast<std::uint64_t>(*v);
    if (auto v = t.get_string("workload", "format")) w.format = *v;
    if (auto v = t.get_string("workload", "train")) w.train = *v;
    if (auto v = t.get_string("workload", "train_labels")) w.train_labels = *v;
    if (auto v = t.get_string("workload", "test")) w.test = *v;
    if (auto v = t.get_string("workload", "test_labels")) w.test_labels = *v;
    if (auto v = t.get_bool("workload", "add_bias")) w.add_bias = *v;

    auto& tp = s.topology;
    if (auto v = t.get_string("topology", "kind")) tp.kind = *v;
    topology_from_string(tp.kind);  // validates
    if (auto v = t.get_int("topology", "n")) tp.n = static_cast<int>(*v);
    if (auto v = t.get_double("topology", "param")) tp.param = *v;
    if (auto v = t.get_int("topology", "seed")) tp.seed = static_cast<std::uint64_t>(*v);
    if (auto v = t.get_string("topology", "mixing")) tp.mixing_path = *v;

    auto& g = s.grid;
    if (auto v = t.get_double_list("grid", "p")) g.p = *v;
    if (auto v = t.get_int_list("grid", "local_updates")) {
        g.local_updates.clear();
        for (auto x : *v) g.local_updates.push_back(static_cast<int>(x));
    }
    if (auto v = t.get_int_list("grid", "seeds")) {
        g.seeds.clear();
        for (auto x : *v) g.seeds.push_back(static_cast<std::uint64_t>(x));
    }
    if (g.p.empty() || g.local_updates.empty() || g.seeds.empty())
        throw ConfigError("[grid] p, local_updates and seeds must be nonempty");
    for (double p : g.p)
        if (p < 0.0 || p > 1.0) throw ConfigError("[grid] p values must lie in [0,1]");
    for (int To : g.local_updates)
        if (To < 1) throw ConfigError("[grid] local_updates must be >= 1");

    auto& r = s.run;
    if (auto v = t.get_int("run", "rounds")) r.rounds = *v;
    if (r.rounds < 1) throw ConfigError("[run] rounds must be >= 1");
    if (auto v = t.get_int("run", "batch")) r.batch = *v;
    if (r.batch < 0) throw ConfigError("[run] batch must be >= 0 (0 = full batch)");
    if (auto v = t.get_double("run", "eta_l")) r.eta_l = *v;
    if (auto v = t.get_double("run", "eta_c")) r.eta_c = *v;
    if (r.eta_l < 0.0 || r.eta_c < 0.0) throw ConfigError("[run] step sizes must be >= 0");
    if (auto v = t.get_double("run", "alpha")) r.alpha = *v;
    if (auto v = t.get_double("run", "smoothness")) r.smoothness = *v;
    if (auto v = t.get_double("run", "sigma")) r.sigma = *v;
    if (auto v = t.get_double("run", "f_star")) r.f_star = *v;
    if (auto v = t.get_int("run", "metrics_every")) r.metrics_every = *v;
    if (r.metrics_every < 1) throw ConfigError("[run] metrics_every must be >= 1");

    auto& st = s.stopping;
    if (auto v = t.get_double("stopping", "train_grad_threshold")) st.train_grad_threshold = *v;
    if (auto v = t.get_double("stopping", "test_acc_threshold")) st.test_acc_threshold = *v;
    if (st.train_grad_threshold < 0.0 || st.test_acc_threshold < 0.0)
        throw ConfigError("[stopping] thresholds must be positive (0 disables)");
    if (auto v = t.get_bool("stopping", "early_stop")) st.early_stop = *v;

    if (auto v = t.get_string("output", "dir")) s.out_dir = *v;
    if (auto v = t.get_int("output", "workers")) s.workers = static_cast<int>(*v);
    return s;
}

ExperimentSpec ExperimentSpec::from_file(const std::string& path) {
    return from_toml(toml::Table::parse_file(path));
}

toml::Table ExperimentSpec::to_toml() const {
    toml::Table t;
    const auto& w = workload;
    t.set("workload", "kind", {w.kind});
    t.set("workload", "rho", {w.rho});
    t.set("workload", "synthetic", {w.synthetic});
    t.set("workload", "samples_per_agent", {w.samples_per_agent});
    t.set("workload", "dim", {w.dim});
    t.set("workload", "shift", {w.shift});
    t.set("workload", "classes", {std::int64_t(w.classes)});
    t.set("workload", "hidden", {std::int64_t(w.hidden)});
    t.set("workload", "data_seed", {std::int64_t(w.data_seed)});
    t.set("workload", "format", {w.format});
    t.set("workload", "train", {w.train});
    t.set("workload", "train_labels", {w.train_labels});
    t.set("workload", "test", {w.test});
    t.set("workload", "test_labels", {w.test_labels});
    t.set("workload", "add_bias", {w.add_bias});

    t.set("topology", "kind", {topology.kind});
    t.set("topology", "n", {std::int64_t(topology.n)});
    t.set("topology", "param", {topology.param});
    t.set("topology", "seed", {std::int64_t(topology.seed)});
    t.set("topology", "mixing", {topology.mixing_path});

    std::vector<toml::Value> pv, tv, sv;
    for (double p : grid.p) pv.push_back({p});
    for (int x : grid.local_updates) tv.push_back({std::int64_t(x)});
    for (auto x : grid.seeds) sv.push_back({std::int64_t(x)});
    t.set("grid", "p", {std::move(pv)});
    t.set("grid", "local_updates", {std::move(tv)});
    t.set("grid", "seeds", {std::move(sv)});

    t.set("run", "rounds", {run.rounds});
    t.set("run", "batch", {run.batch});
    t.set("run", "eta_l", {run.eta_l});
    t.set("run", "eta_c", {run.eta_c});
    t.set("run", "alpha", {run.alpha});
    t.set("run", "smoothness", {run.smoothness});
    t.set("run", "sigma", {run.sigma});
    t.set("run", "f_star", {run.f_star});
    t.set("run", "metrics_every", {run.metrics_every});

    t.set("stopping", "train_grad_threshold", {stopping.train_grad_threshold});
    t.set("stopping", "test_acc_threshold", {stopping.test_acc_threshold});
    t.set("stopping", "early_stop", {stopping.early_stop});

    t.set("output", "dir", {out_dir});
    t.set("output", "workers", {std::int64_t(workers)});
    return t;
}

// ---------------------------------------------------------------------------
// Workbench
// ---------------------------------------------------------------------------

Workbench prepare_workbench(const ExperimentSpec& spec) {
    const auto& w = spec.workload;
    Workbench bench;

    if (w.synthetic) {
        if (w.kind == "logistic") {
            bench.parts = synth_logistic(spec.topology.n, w.samples_per_agent, w.dim, w.shift,
                                         w.data_seed);
            bench.oracle = ModelOracle::logistic(w.dim, w.rho);
        } else {
            bench.parts = synth_multiclass(spec.topology.n, w.samples_per_agent, w.dim,
                                           w.classes, w.shift, w.data_seed);
            bench.oracle = ModelOracle::mlp(static_cast<int>(w.dim), w.hidden, w.classes);
        }
    } else {
        Dataset train;
        if (w.format == "libsvm") {
            std::ifstream in(w.train);
            if (!in) throw DataError("cannot open train file: " + w.train);
            train = parse_libsvm(in, 0, w.add_bias);
        } else if (w.format == "idx") {
            std::ifstream img(w.train, std::ios::binary), lab(w.train_labels, std::ios::binary);
            if (!img) throw DataError("cannot open train images: " + w.train);
            if (!lab) throw DataError("cannot open train labels: " + w.train_labels);
            train = parse_idx(img, lab, true);
        } else {
            throw ConfigError("[workload] format must be 'libsvm' or 'idx'");
        }
        bench.parts = partition_sorted(train, spec.topology.n);
        if (w.kind == "logistic") {
            bench.oracle = ModelOracle::logistic(train.d, w.rho);
        } else {
            bench.oracle =
                ModelOracle::mlp(static_cast<int>(train.d), w.hidden, train.n_classes);
        }
        if (!w.test.empty()) {
            if (w.format == "libsvm") {
                std::ifstream in(w.test);
                if (!in) throw DataError("cannot open test file: " + w.test);
                bench.test_data = parse_libsvm(in, train.d - (w.add_bias ? 1 : 0), w.add_bias);
            } else {
                std::ifstream img(w.test, std::ios::binary), lab(w.test_labels, std::ios::binary);
                if (!img) throw DataError("cannot open test images: " + w.test);
                if (!lab) throw DataError("cannot open test labels: " + w.test_labels);
                bench.test_data = parse_idx(img, lab, true);
            }
        }
    }

    bench.graph = build_topology(topology_from_string(spec.topology.kind), spec.topology.n,
                                 spec.topology.param, spec.topology.seed);
    if (!spec.topology.mixing_path.empty())
        bench.mixing = load_mixing_matrix(std::filesystem::path(spec.topology.mixing_path),
                                          &bench.graph);
    else
        bench.mixing = metropolis_weights(bench.graph);
    return bench;
}

// ---------------------------------------------------------------------------
// Single run
// ---------------------------------------------------------------------------

namespace {

double smoothness_for(const Workbench& bench, const ExperimentSpec& spec) {
    if (spec.run.smoothness > 0.0) return spec.run.smoothness;
    if (bench.oracle.kind == ModelKind::logistic_ncvx)
        return logistic_smoothness(bench.parts, bench.oracle.rho);
    throw ConfigError("auto step sizes for the mlp workload need [run] smoothness > 0");
}

// f(x0), full batch over all parts.
double initial_objective(const Workbench& bench, const std::vector<double>& x0) {
    std::vector<double> scratch(bench.oracle.dim);
    double f0 = 0.0;
    for (const Dataset& part : bench.parts.parts) {
        Batch full;
        full.idx.resize(part.s);
        for (std::int64_t i = 0; i < part.s; ++i) full.idx[i] = i;
        f0 += loss_grad(bench.oracle, x0, part, full, scratch);
    }
    return f0 / static_cast<double>(bench.parts.n());
}

std::string run_csv_name(double p, int T_o, std::uint64_t seed) {
    std::ostringstream os;
    os << "run_p" << fmt_g(p) << "_T" << T_o << "_s" << seed << ".csv";
    return os.str();
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out =
        "round,comm_kind,grad_norm_sq,consensus_err,tracking_err,tracking_residual,"
        "train_loss,train_acc,test_acc\n";
    for (const MetricsRow& r : rows) {
        out += std::to_string(r.round);
        out += ',';
        out += !r.comm_kind ? "none" : (*r.comm_kind == CommKind::server ? "server" : "gossip");
        out += ',';
        out += csv::fmt(r.grad_norm_sq) + ',' + csv::fmt(r.consensus_err) + ',' +
               csv::fmt(r.tracking_err) + ',' + csv::fmt(r.tracking_residual) + ',' +
               csv::fmt(r.train_loss) + ',' + csv::fmt(r.train_acc) + ',';
        if (r.test_acc) out += csv::fmt(*r.test_acc);
        out += '\n';
    }
    return out;
}

}  // namespace

RunRecord run_single(const Workbench& bench, const ExperimentSpec& spec, double p, int T_o,
                     std::uint64_t seed) {
    RunRecord rec;
    rec.p = p;
    rec.T_o = T_o;
    rec.seed = seed;

    RunConfig cfg;
    cfg.p = p;
    cfg.T_o = T_o;
    cfg.seed = seed;
    cfg.K = spec.run.rounds;
    cfg.b = spec.run.batch > 0 ? spec.run.batch : bench.parts.part_size();

    const std::vector<double> x0 = init_params(bench.oracle, seed);

    if (spec.run.eta_l > 0.0 && spec.run.eta_c > 0.0) {
        cfg.eta_l = spec.run.eta_l;
        cfg.eta_c = spec.run.eta_c;
    } else {
        const CommPolicy policy = CommPolicy::make(bench.mixing, p);  // rejects lambda_p == 0
        const double L = smoothness_for(bench, spec);
        const double f0 = initial_objective(bench, x0);
        const double sigma = cfg.b >= bench.parts.part_size() ? 0.0 : spec.run.sigma;
        const StepSizePlan plan =
            plan_step_sizes(spec.run.alpha, p, policy.lambda_p, L, T_o, sigma, cfg.b,
                            bench.parts.n(), cfg.K, f0 - spec.run.f_star);
        cfg.eta_l = spec.run.eta_l > 0.0 ? spec.run.eta_l : plan.eta_l;
        cfg.eta_c = spec.run.eta_c > 0.0 ? spec.run.eta_c : plan.eta_c;
    }
    rec.resolved = cfg;

    NetworkState state = init_state(x0, bench.oracle, bench.parts, cfg);
    const Dataset* test = bench.test_data ? &*bench.test_data : nullptr;

    rec.rows.push_back(metrics_snapshot(state, bench.oracle, bench.parts, test));

    const double tau_train = spec.stopping.train_grad_threshold;
    const double tau_test = spec.stopping.test_acc_threshold;
    double grad_running_sum = rec.rows.front().grad_norm_sq;
    std::int64_t rows_seen = 1;
    if (tau_train > 0.0 && grad_running_sum / rows_seen <= tau_train)
        rec.rounds_to_train_threshold = 0;
    if (tau_test > 0.0 && rec.rows.front().test_acc &&
        *rec.rows.front().test_acc >= tau_test)
        rec.rounds_to_test_threshold = 0;

    for (std::int64_t k = 0; k < cfg.K; ++k) {
        const RoundOutcome outcome = staged_round(state, bench.oracle, bench.parts, bench.mixing, cfg);
        (outcome.kind == CommKind::server ? rec.server_rounds : rec.gossip_rounds) += 1;

        if (state.round % spec.run.metrics_every == 0 || state.round == cfg.K) {
            MetricsRow row = metrics_snapshot(state, bench.oracle, bench.parts, test);
            row.comm_kind = outcome.kind;
            rec.rows.push_back(row);
            grad_running_sum += row.grad_norm_sq;
            rows_seen += 1;
            if (tau_train > 0.0 && !rec.rounds_to_train_threshold &&
                grad_running_sum / rows_seen <= tau_train)
                rec.rounds_to_train_threshold = state.round;
            if (tau_test > 0.0 && !rec.rounds_to_test_threshold && row.test_acc &&
                *row.test_acc >= tau_test)
                rec.rounds_to_test_threshold = state.round;

            if (spec.stopping.early_stop) {
                const bool train_done = tau_train <= 0.0 || rec.rounds_to_train_threshold;
                const bool test_done = tau_test <= 0.0 || rec.rounds_to_test_threshold;
                const bool any_active = tau_train > 0.0 || tau_test > 0.0;
                if (any_active && train_done && test_done) break;
            }
        }
    }

    // Peak-relative test criterion is only known once the run is complete.
    double peak = 0.0;
    for (const MetricsRow& r : rec.rows)
        if (r.test_acc) peak = std::max(peak, *r.test_acc);
    if (peak > 0.0) {
        for (const MetricsRow& r : rec.rows) {
            if (r.test_acc && *r.test_acc >= 0.95 * peak) {
                rec.rounds_to_test_peak = r.round;
                break;
            }
        }
    }
    return rec;
}

// ---------------------------------------------------------------------------
// Grid execution + CSV emission
// ---------------------------------------------------------------------------

namespace {

const char* kMetricNames[] = {"grad_norm_sq", "consensus_err", "tracking_err",
                              "tracking_residual", "train_loss", "train_acc", "test_acc"};

double metric_value(const MetricsRow& r, int m) {
    switch (m) {
        case 0: return r.grad_norm_sq;
        case 1: return r.consensus_err;
        case 2: return r.tracking_err;
        case 3: return r.tracking_residual;
        case 4: return r.train_loss;
        case 5: return r.train_acc;
        default: return r.test_acc ? *r.test_acc : std::nan("");
    }
}

std::string aggregate_csv(const std::vector<RunRecord>& records, const GridSpec& grid) {
    std::string out = "p,T_o,n_seeds,round";
    for (const char* m : kMetricNames) {
        out += ',';
        out += m;
        out += "_mean,";
        out += m;
        out += "_std";
    }
    out += '\n';

    for (double p : grid.p) {
        for (int To : grid.local_updates) {
            std::vector<const RunRecord*> cell;
            for (const RunRecord& r : records)
                if (r.p == p && r.T_o == To) cell.push_back(&r);
            if (cell.empty()) continue;
            std::size_t max_rows = 0;
            for (const RunRecord* r : cell) max_rows = std::max(max_rows, r->rows.size());
            for (std::size_t i = 0; i < max_rows; ++i) {
                // Average only over runs that reached this row (early stopping
                // can shorten individual runs).
                std::vector<const MetricsRow*> rows;
                for (const RunRecord* r : cell)
                    if (i < r->rows.size()) rows.push_back(&r->rows[i]);
                out += csv::fmt(p) + ',' + std::to_string(To) + ',' +
                       std::to_string(rows.size()) + ',' + std::to_string(rows.front()->round);
                for (int m = 0; m < 7; ++m) {
                    double sum = 0.0, count = 0.0;
                    for (const MetricsRow* r : rows) {
                        const double v = metric_value(*r, m);
                        if (!std::isnan(v)) {
                            sum += v;
                            count += 1.0;
                        }
                    }
                    if (count == 0.0) {
                        out += ",,";
                        continue;
                    }
                    const double mean = sum / count;
                    double var = 0.0;
                    for (const MetricsRow* r : rows) {
                        const double v = metric_value(*r, m);
                        if (!std::isnan(v)) var += (v - mean) * (v - mean);
                    }
                    const double sd = count > 1.0 ? std::sqrt(var / (count - 1.0)) : 0.0;
                    out += ',' + csv::fmt(mean) + ',' + csv::fmt(sd);
                }
                out += '\n';
            }
        }
    }
    return out;
}

std::string thresholds_csv(const std::vector<RunRecord>& records) {
    std::string out =
        "p,T_o,seed,rounds_to_train_threshold,rounds_to_test_threshold,rounds_to_test_peak,"
        "gossip_rounds,server_rounds\n";
    for (const RunRecord& r : records) {
        out += csv::fmt(r.p) + ',' + std::to_string(r.T_o) + ',' + std::to_string(r.seed) + ',';
        if (r.rounds_to_train_threshold) out += std::to_string(*r.rounds_to_train_threshold);
        out += ',';
        if (r.rounds_to_test_threshold) out += std::to_string(*r.rounds_to_test_threshold);
        out += ',';
        if (r.rounds_to_test_peak) out += std::to_string(*r.rounds_to_test_peak);
        out += ',' + std::to_string(r.gossip_rounds) + ',' + std::to_string(r.server_rounds) +
               '\n';
    }
    return out;
}

std::string thresholds_agg_csv(const std::vector<RunRecord>& records, const GridSpec& grid) {
    std::string out =
        "p,T_o,n_seeds,rounds_to_train_threshold_mean,rounds_to_test_threshold_mean,"
        "rounds_to_test_peak_mean,gossip_rounds_mean,server_rounds_mean\n";
    for (double p : grid.p) {
        for (int To : grid.local_updates) {
            std::vector<const RunRecord*> cell;
            for (const RunRecord& r : records)
                if (r.p == p && r.T_o == To) cell.push_back(&r);
            if (cell.empty()) continue;
            out += csv::fmt(p) + ',' + std::to_string(To) + ',' + std::to_string(cell.size());
            // Threshold rounds average as reals over the runs that crossed.
            auto mean_of = [&](auto getter) -> std::string {
                double sum = 0.0;
                int cnt = 0;
                for (const RunRecord* r : cell) {
                    const auto v = getter(*r);
                    if (v) {
                        sum += static_cast<double>(*v);
                        ++cnt;
                    }
                }
                return cnt == static_cast<int>(cell.size()) ? csv::fmt(sum / cnt) : std::string();
            };
            out += ',' + mean_of([](const RunRecord& r) { return r.rounds_to_train_threshold; });
            out += ',' + mean_of([](const RunRecord& r) { return r.rounds_to_test_threshold; });
            out += ',' + mean_of([](const RunRecord& r) { return r.rounds_to_test_peak; });
            double gs = 0.0, ss = 0.0;
            for (const RunRecord* r : cell) {
                gs += static_cast<double>(r->gossip_rounds);
                ss += static_cast<double>(r->server_rounds);
            }
            out += ',' + csv::fmt(gs / cell.size()) + ',' + csv::fmt(ss / cell.size()) + '\n';
        }
    }
    return out;
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec) {
    const Workbench bench = prepare_workbench(spec);
    const std::filesystem::path out_dir(spec.out_dir);
    std::filesystem::create_directories(out_dir);

    struct Cell {
        double p;
        int To;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (double p : spec.grid.p)
        for (int To : spec.grid.local_updates)
            for (std::uint64_t s : spec.grid.seeds) cells.push_back({p, To, s});

    std::vector<RunRecord> records(cells.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mu;

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_workers =
        std::min<std::size_t>(cells.size(), spec.workers > 0 ? spec.workers : hw);

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size() || failed.load()) return;
            try {
                RunRecord rec = run_single(bench, spec, cells[i].p, cells[i].To, cells[i].seed);
                const std::filesystem::path path =
                    out_dir / run_csv_name(rec.p, rec.T_o, rec.seed);
                csv::write_atomic(path, metrics_csv(rec.rows));
                rec.csv_path = path.string();
                records[i] = std::move(rec);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!failed.exchange(true)) first_error = std::current_exception();
                return;
            }
        }
    };

    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) std::rethrow_exception(first_error);

    csv::write_atomic(out_dir / "aggregate.csv", aggregate_csv(records, spec.grid));
    csv::write_atomic(out_dir / "thresholds.csv", thresholds_csv(records));
    csv::write_atomic(out_dir / "thresholds_agg.csv", thresholds_agg_csv(records, spec.grid));
    {
        std::ostringstream os;
        spec.to_toml().write(os);
        csv::write_atomic(out_dir / "resolved.toml", os.str());
    }
    return records;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

ValidateReport validate(const ExperimentSpec& spec) {
    const Workbench bench = prepare_workbench(spec);
    ValidateReport rep;
    rep.lambda_second = bench.mixing.lambda_second;
    rep.lambda_w = bench.mixing.lambda_w;

    double L = 0.0;
    bool have_L = true;
    try {
        L = smoothness_for(bench, spec);
    } catch (const ConfigError&) {
        have_L = false;
        rep.warnings.push_back("smoothness unavailable (mlp without [run] smoothness); "
                               "step-size bounds omitted");
    }
    const double f_tilde =
        initial_objective(bench, init_params(bench.oracle, spec.grid.seeds.front())) -
        spec.run.f_star;

    for (double p : spec.grid.p) {
        for (int To : spec.grid.local_updates) {
            ValidateCell cell;
            cell.p = p;
            cell.T_o = To;
            cell.lambda_p = expected_mixing_rate(bench.mixing.lambda_w, p);
            cell.assumption_ok = cell.lambda_p > 0.0;
            if (!cell.assumption_ok) {
                rep.warnings.push_back("cell p=" + fmt_g(p) +
                                       ": expected mixing rate is 0 (disconnected graph with "
                                       "p=0); network-model assumption violated");
            } else if (have_L) {
                const double sigma =
                    (spec.run.batch > 0 && spec.run.batch < bench.parts.part_size())
                        ? spec.run.sigma
                        : 0.0;
                const std::int64_t b =
                    spec.run.batch > 0 ? spec.run.batch : bench.parts.part_size();
                const StepSizePlan plan = plan_step_sizes(
                    spec.run.alpha, p, cell.lambda_p, L, To, sigma, b, bench.parts.n(),
                    spec.run.rounds, f_tilde);
                cell.eta_c = plan.eta_c;
                cell.eta_l_max = plan.eta_l_max;
                cell.K_min = plan.K_min;
                if (plan.eta_c > 1.0)
                    rep.warnings.push_back("cell p=" + fmt_g(p) + " T_o=" + std::to_string(To) +
                                           ": eta_c=" + fmt_g(plan.eta_c) +
                                           " > 1 extrapolates beyond the convex combination");
            }
            rep.cells.push_back(cell);
        }
    }
    return rep;
}

}  // namespace pisco
