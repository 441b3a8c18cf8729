#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pisco/dataio.hpp"
#include "pisco/engine.hpp"
#include "pisco/graphs.hpp"
#include "pisco/models.hpp"
#include "pisco/toml.hpp"

namespace pisco {

struct WorkloadSpec {
    std::string kind = "logistic";  // logistic | mlp
    double rho = 0.01;
    bool synthetic = true;
    std::int64_t samples_per_agent = 200;
    std::int64_t dim = 20;
    double shift = 2.0;
    int classes = 4;   // synthetic multiclass
    int hidden = 32;   // mlp hidden width
    std::uint64_t data_seed = 42;
    std::string format = "libsvm";  // libsvm | idx
    std::string train, train_labels, test, test_labels;
    bool add_bias = true;
};

struct TopologySpec {
    std::string kind = "ring";
    int n = 10;
    double param = 0.3;
    std::uint64_t seed = 1;
    std::string mixing_path;  // optional dense-matrix file (e.g. FDLA weights)
};

struct GridSpec {
    std::vector<double> p{0.0};
    std::vector<int> local_updates{1};
    std::vector<std::uint64_t> seeds{1};
};

struct RunSpec {
    std::int64_t rounds = 100;
    std::int64_t batch = 0;  // 0 => full batch
    double eta_l = 0.0;      // 0 => auto via the step-size plan
    double eta_c = 0.0;      // 0 => auto
    double alpha = 1.0;
    double smoothness = 0.0;  // 0 => analytic logistic bound
    double sigma = 0.0;       // planner noise level
    double f_star = 0.0;      // lower bound used for f~
    std::int64_t metrics_every = 1;
};

struct StoppingSpec {
    double train_grad_threshold = 0.0;  // running-average criterion; 0 => off
    double test_acc_threshold = 0.0;    // absolute accuracy; 0 => off
    bool early_stop = true;             // stop once configured thresholds crossed
};

struct ExperimentSpec {
    WorkloadSpec workload;
    TopologySpec topology;
    GridSpec grid;
    RunSpec run;
    StoppingSpec stopping;
    std::string out_dir = "out";
    int workers = 0;  // 0 => hardware concurrency

    static ExperimentSpec from_toml(const toml::Table& t);
    static ExperimentSpec from_file(const std::string& path);
    toml::Table to_toml() const;  // resolved config, all defaults explicit
};

struct RunRecord {
    double p = 0.0;
    int T_o = 1;
    std::uint64_t seed = 0;
    RunConfig resolved;
    std::vector<MetricsRow> rows;
    std::optional<std::int64_t> rounds_to_train_threshold;
    std::optional<std::int64_t> rounds_to_test_threshold;
    std::optional<std::int64_t> rounds_to_test_peak;  // >= 95% of run peak
    std::int64_t gossip_rounds = 0;
    std::int64_t server_rounds = 0;
    std::string csv_path;
};

// Materialized experiment inputs shared by every grid cell.
struct Workbench {
    ModelOracle oracle;
    PartitionedDataset parts;
    std::optional<Dataset> test_data;
    Graph graph;
    MixingMatrix mixing;
};

Workbench prepare_workbench(const ExperimentSpec& spec);

// Executes the full grid (p x T_o x seeds), writes one CSV per run plus
// aggregate and threshold tables under out_dir, and returns the records.
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec);

// One grid cell; metrics rows include the initial state (round 0).
RunRecord run_single(const Workbench& bench, const ExperimentSpec& spec, double p, int T_o,
                     std::uint64_t seed);

struct ValidateCell {
    double p = 0.0;
    int T_o = 1;
    double lambda_p = 0.0;
    bool assumption_ok = true;
    double eta_c = 0.0, eta_l_max = 0.0, K_min = 0.0;  // zero when assumption fails
};

struct ValidateReport {
    double lambda_second = 0.0;
    double lambda_w = 0.0;
    std::vector<ValidateCell> cells;
    std::vector<std::string> warnings;
};

// Dry run: builds the topology and mixing, reports spectral quantities and
// the step-size bounds per grid cell. No optimization is executed.
ValidateReport validate(const ExperimentSpec& spec);

// Renders seed-averaged metric curves and the gossip/server threshold bar
// chart from the CSVs in run_dir; also writes the plotted data as CSV so the
// images are externally reproducible.
void emit_plots(const std::filesystem::path& run_dir);

}  // namespace pisco
