#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pisco/csv.hpp"
#include "pisco/errors.hpp"
#include "pisco/harness.hpp"
#include "pisco/kernels.hpp"

namespace {

void print_validate(const pisco::ValidateReport& rep) {
    std::printf("lambda_second = %.12g\n", rep.lambda_second);
    std::printf("lambda_w      = %.12g\n", rep.lambda_w);
    std::printf("%-10s %-6s %-14s %-12s %-14s %-14s\n", "p", "T_o", "lambda_p", "eta_c",
                "eta_l_max", "K_min");
    for (const pisco::ValidateCell& c : rep.cells) {
        if (c.assumption_ok)
            std::printf("%-10.6g %-6d %-14.10g %-12.6g %-14.6g %-14.6g\n", c.p, c.T_o, c.lambda_p,
                        c.eta_c, c.eta_l_max, c.K_min);
        else
            std::printf("%-10.6g %-6d %-14.10g %s\n", c.p, c.T_o, c.lambda_p,
                        "ASSUMPTION VIOLATED (lambda_p = 0)");
    }
    for (const std::string& w : rep.warnings) std::printf("warning: %s\n", w.c_str());
}

int dispatch(int argc, char** argv) {
    CLI::App app{"pisco: semi-decentralized gradient-tracking optimization simulator"};
    app.require_subcommand(1);

    std::string spec_path;
    auto* run_cmd = app.add_subcommand("run", "execute an experiment spec");
    run_cmd->add_option("spec", spec_path, "experiment spec (TOML)")->required();
    bool no_plots = false;
    run_cmd->add_flag("--no-plots", no_plots, "skip chart rendering");

    std::string validate_path;
    auto* val_cmd = app.add_subcommand("validate", "dry-run spectral/step-size report");
    val_cmd->add_option("spec", validate_path, "experiment spec (TOML)")->required();

    std::string plot_dir;
    auto* plot_cmd = app.add_subcommand("plot", "render charts from a run directory");
    plot_cmd->add_option("run_dir", plot_dir, "directory with run CSVs")->required();

    auto* spec_cmd = app.add_subcommand("spectrum", "spectral quantities of a topology");
    std::string sp_kind = "ring";
    int sp_n = 10;
    double sp_param = 0.3;
    std::uint64_t sp_seed = 1;
    std::string sp_mixing;
    std::vector<double> sp_p;
    spec_cmd->add_option("--kind", sp_kind, "ring|path|complete|erdos_renyi");
    spec_cmd->add_option("--n", sp_n, "agent count");
    spec_cmd->add_option("--param", sp_param, "edge probability for erdos_renyi");
    spec_cmd->add_option("--seed", sp_seed, "topology seed");
    spec_cmd->add_option("--mixing", sp_mixing, "dense mixing-matrix file (default Metropolis)");
    spec_cmd->add_option("--p", sp_p, "server probabilities to report lambda_p for");

    CLI11_PARSE(app, argc, argv);

    if (*run_cmd) {
        const pisco::ExperimentSpec spec = pisco::ExperimentSpec::from_file(spec_path);
        const auto records = pisco::run_experiment(spec);
        if (!no_plots) pisco::emit_plots(spec.out_dir);
        std::printf("wrote %zu runs to %s (kernels: %s)\n", records.size(),
                    spec.out_dir.c_str(), std::string(pisco::kernels::backend_name()).c_str());
        for (const pisco::RunRecord& r : records) {
            std::printf("  p=%-8.6g T_o=%-3d seed=%-4llu rounds=%lld gossip=%lld server=%lld",
                        r.p, r.T_o, static_cast<unsigned long long>(r.seed),
                        static_cast<long long>(r.gossip_rounds + r.server_rounds),
                        static_cast<long long>(r.gossip_rounds),
                        static_cast<long long>(r.server_rounds));
            if (r.resolved.eta_c > 1.0)
                std::printf("  [eta_c=%.4g > 1: extrapolated combination]", r.resolved.eta_c);
            if (r.rounds_to_train_threshold)
                std::printf("  train_thresh@%lld",
                            static_cast<long long>(*r.rounds_to_train_threshold));
            if (r.rounds_to_test_threshold)
                std::printf("  test_thresh@%lld",
                            static_cast<long long>(*r.rounds_to_test_threshold));
            std::printf("\n");
        }
        return 0;
    }
    if (*val_cmd) {
        const pisco::ExperimentSpec spec = pisco::ExperimentSpec::from_file(validate_path);
        print_validate(pisco::validate(spec));
        return 0;
    }
    if (*plot_cmd) {
        pisco::emit_plots(plot_dir);
        std::printf("charts written to %s\n", plot_dir.c_str());
        return 0;
    }
    if (*spec_cmd) {
        const pisco::Topology kind = pisco::topology_from_string(sp_kind);
        const pisco::Graph g = pisco::build_topology(kind, sp_n, sp_param, sp_seed);
        const pisco::MixingMatrix mm =
            sp_mixing.empty()
                ? pisco::metropolis_weights(g)
                : pisco::load_mixing_matrix(std::filesystem::path(sp_mixing), &g);
        std::printf("topology=%s n=%d edges=%zu components=%d\n", sp_kind.c_str(), sp_n,
                    g.edges.size(), g.component_count());
        std::printf("lambda_second = %.12g\nlambda_w      = %.12g\n", mm.lambda_second,
                    mm.lambda_w);
        for (const double p : sp_p)
            std::printf("lambda_p(p=%.6g) = %.12g\n", p,
                        pisco::expected_mixing_rate(mm.lambda_w, p));
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const pisco::AssumptionError& e) {
        std::fprintf(stderr, "assumption violation: %s\n", e.what());
        return 4;
    } catch (const pisco::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const pisco::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
