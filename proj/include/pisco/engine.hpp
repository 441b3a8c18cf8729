#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pisco/graphs.hpp"
#include "pisco/matrix.hpp"
#include "pisco/models.hpp"

namespace pisco {

// Gradient-tracking network state. Columns of X are agent parameter vectors,
// Y are tracking variables, G the last stochastic gradients. Invariants: at
// construction Y = G exactly, and the row means of Y and G stay equal (up to
// roundoff) after every round -- the tracking identity.
struct NetworkState {
    Matrix X, Y, G;
    std::int64_t round = 0;

    std::size_t dim() const { return X.rows(); }
    std::size_t agents() const { return X.cols(); }
};

struct RunConfig {
    double p = 0.0;       // server-access probability
    int T_o = 1;          // local updates per round
    double eta_l = 0.0;   // local step size
    double eta_c = 0.0;   // communication step size
    std::int64_t b = 0;   // mini-batch size (>= part size selects full batch)
    std::int64_t K = 0;   // rounds
    std::uint64_t seed = 0;

    double eta() const { return eta_c * eta_l; }
};

enum class CommKind { gossip, server };

// One round's communication channel: the gossip matrix or exact averaging
// through the server.
struct CommDraw {
    CommKind kind = CommKind::gossip;
    const MixingMatrix* w = nullptr;  // used when kind == gossip
};

// Single global Bernoulli(p) draw per round from the dedicated communication
// stream; server availability is network-wide, not per-agent.
CommDraw draw_comm_matrix(double p, const MixingMatrix& w, std::uint64_t seed, std::int64_t round);

// out = in * W_k (right multiplication); the server channel averages columns
// exactly.
void apply_mixing(const Matrix& in, const CommDraw& comm, Matrix& out);

// X0 replicates x0 across agents; G0 comes from the round-0 keyed batches and
// Y0 = G0 exactly.
NetworkState init_state(std::span<const double> x0, const ModelOracle& oracle,
                        const PartitionedDataset& parts, const RunConfig& cfg);

// Output of the T_o local updates of one round, plus the gradient sum the
// compact form needs. max_tracking_ratio is the worst per-step value of
// ||Ybar - Gbar||_F / (1 + ||Gbar||_F) observed along the way (the tracking
// identity, normalized).
struct LocalPhase {
    Matrix X_T, Y_T, G_T;
    Matrix G_sum;  // sum over t = 1..T_o of the local-step gradients
    double max_tracking_ratio = 0.0;
};

LocalPhase local_phase(const NetworkState& state, const ModelOracle& oracle,
                       const PartitionedDataset& parts, const RunConfig& cfg);

// Communication update: convex combination with weight eta_c, mixing by the
// drawn matrix, fresh gradient at the new iterate, tracking correction.
// Advances state.round.
void comm_phase(NetworkState& state, const LocalPhase& locals, const CommDraw& comm,
                const ModelOracle& oracle, const PartitionedDataset& parts, const RunConfig& cfg);

// One staged round (local phase + communication phase) with the round's
// Bernoulli draw; returns what was drawn and the local-phase residual.
struct RoundOutcome {
    CommKind kind = CommKind::gossip;
    double max_tracking_ratio = 0.0;  // from the round's local phase
};

RoundOutcome staged_round(NetworkState& state, const ModelOracle& oracle,
                          const PartitionedDataset& parts, const MixingMatrix& w,
                          const RunConfig& cfg);

// One-shot rewriting of the same round with eta = eta_c * eta_l. Consumes the
// same keyed batches as the staged form, so both produce the same trajectory
// up to floating-point assembly order.
void compact_round(NetworkState& state, const ModelOracle& oracle,
                   const PartitionedDataset& parts, const CommDraw& comm, const RunConfig& cfg);

// Baseline: single-step decentralized stochastic gradient tracking with step
// eta = cfg.eta(). X <- (X - eta Y) W ; Y <- Y W + G' - G.
void dsgt_round(NetworkState& state, const ModelOracle& oracle, const PartitionedDataset& parts,
                const MixingMatrix& w, const RunConfig& cfg);

// Step-size plan from the convergence guarantee: eta_c = alpha sqrt(1+p)
// lambda_p, eta_l capped by sqrt(1+p) lambda_p / (360 alpha L (T_o+1)), and
// for sigma > 0 the tuned eta_l plus the minimal K making the tuning valid.
struct StepSizePlan {
    double alpha = 1.0;
    double L = 0.0;
    double sigma = 0.0;
    double eta_c = 0.0;
    double eta_l_max = 0.0;
    double eta_l = 0.0;
    double K_min = 0.0;
};

StepSizePlan plan_step_sizes(double alpha, double p, double lambda_p, double L, int T_o,
                             double sigma, std::int64_t b, int n, std::int64_t K, double f_tilde);

struct MetricsRow {
    std::int64_t round = 0;
    std::optional<CommKind> comm_kind;  // empty for the initial row
    double grad_norm_sq = 0.0;          // ||grad f(xbar)||^2, full batch
    double consensus_err = 0.0;         // ||X - Xbar||_F^2
    double tracking_err = 0.0;          // ||Y - Ybar||_F^2
    double tracking_residual = 0.0;     // ||Ybar - Gbar||_F (mean-replicated)
    double train_loss = 0.0;
    double train_acc = 0.0;
    std::optional<double> test_acc;
};

MetricsRow metrics_snapshot(const NetworkState& state, const ModelOracle& oracle,
                            const PartitionedDataset& parts, const Dataset* test_data);

}  // namespace pisco
