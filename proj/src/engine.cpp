#include "pisco/engine.hpp"

#include <algorithm>
#include <cmath>

#include "pisco/errors.hpp"
#include "pisco/kernels.hpp"

namespace pisco {

namespace {

// Batch key layout: round 0 / step 0 is the initialization draw; round k+1
// carries the k-th round's draws with step t in 1..T_o for the local updates
// and step 0 for the communication gradient. Staged and compact rounds thus
// consume identical batches by construction.
std::vector<Batch> draw_batches(const PartitionedDataset& parts, const RunConfig& cfg,
                                std::int64_t round_index, std::uint64_t step) {
    std::vector<Batch> batches(parts.parts.size());
    for (std::size_t i = 0; i < batches.size(); ++i) {
        batches[i] = draw_minibatch(
            parts.parts[i].s, cfg.b,
            RngStream::keyed(cfg.seed, StreamPurpose::batch, static_cast<std::uint64_t>(round_index),
                             i, step));
    }
    return batches;
}

// ||Ybar - Gbar||_F / (1 + ||Gbar||_F) on the mean-replicated matrices.
double tracking_ratio(const Matrix& y, const Matrix& g) {
    const std::vector<double> ybar = y.row_mean();
    const std::vector<double> gbar = g.row_mean();
    const double n = static_cast<double>(y.cols());
    const double resid =
        std::sqrt(n * kernels::sumsq_diff(ybar.data(), gbar.data(), ybar.size()));
    const double scale = std::sqrt(n * kernels::sumsq(gbar.data(), gbar.size()));
    return resid / (1.0 + scale);
}

}  // namespace

CommDraw draw_comm_matrix(double p, const MixingMatrix& w, std::uint64_t seed,
                          std::int64_t round) {
    if (p < 0.0 || p > 1.0) throw ConfigError("p out of [0,1]");
    RngStream stream =
        RngStream::keyed(seed, StreamPurpose::comm_draw, static_cast<std::uint64_t>(round));
    CommDraw draw;
    draw.kind = stream.next_double() < p ? CommKind::server : CommKind::gossip;
    draw.w = &w;
    return draw;
}

void apply_mixing(const Matrix& in, const CommDraw& comm, Matrix& out) {
    const std::size_t d = in.rows(), n = in.cols();
    if (out.rows() != d || out.cols() != n) out = Matrix(d, n);
    if (comm.kind == CommKind::server) {
        // Exact averaging: every column becomes the row mean.
        const std::vector<double> mean = in.row_mean();
        for (std::size_t j = 0; j < n; ++j)
            std::copy(mean.begin(), mean.end(), out.col(j));
        return;
    }
    const Matrix& w = comm.w->w;
    for (std::size_t j = 0; j < n; ++j) {
        double* oj = out.col(j);
        std::fill(oj, oj + d, 0.0);
        const double* wj = w.col(j);
        for (std::size_t i = 0; i < n; ++i)
            if (wj[i] != 0.0) kernels::axpy(wj[i], in.col(i), oj, d);
    }
}

NetworkState init_state(std::span<const double> x0, const ModelOracle& oracle,
                        const PartitionedDataset& parts, const RunConfig& cfg) {
    if (static_cast<std::int64_t>(x0.size()) != oracle.dim)
        throw ConfigError("init_state: x0 dimension mismatch");
    const std::size_t n = parts.parts.size();
    NetworkState st;
    st.X = Matrix(oracle.dim, n);
    for (std::size_t j = 0; j < n; ++j) std::copy(x0.begin(), x0.end(), st.X.col(j));
    const std::vector<Batch> batches = draw_batches(parts, cfg, /*round_index=*/0, /*step=*/0);
    distributed_stochastic_gradient(oracle, st.X, parts, batches, st.G);
    st.Y = st.G;
    st.round = 0;
    return st;
}

LocalPhase local_phase(const NetworkState& state, const ModelOracle& oracle,
                       const PartitionedDataset& parts, const RunConfig& cfg) {
    const std::int64_t r = state.round + 1;
    LocalPhase lp;
    lp.X_T = state.X;
    lp.Y_T = state.Y;
    lp.G_T = state.G;
    lp.G_sum = Matrix(state.X.rows(), state.X.cols(), 0.0);
    Matrix g_next(state.X.rows(), state.X.cols());
    for (int t = 1; t <= cfg.T_o; ++t) {
        kernels::axpy(-cfg.eta_l, lp.Y_T.data(), lp.X_T.data(), lp.X_T.size());
        const std::vector<Batch> batches =
            draw_batches(parts, cfg, r, static_cast<std::uint64_t>(t));
        distributed_stochastic_gradient(oracle, lp.X_T, parts, batches, g_next);
        kernels::add_diff(lp.Y_T.data(), g_next.data(), lp.G_T.data(), lp.Y_T.size());
        kernels::axpy(1.0, g_next.data(), lp.G_sum.data(), lp.G_sum.size());
        lp.G_T = g_next;
        lp.max_tracking_ratio = std::max(lp.max_tracking_ratio, tracking_ratio(lp.Y_T, lp.G_T));
    }
    return lp;
}

void comm_phase(NetworkState& state, const LocalPhase& locals, const CommDraw& comm,
                const ModelOracle& oracle, const PartitionedDataset& parts,
                const RunConfig& cfg) {
    const std::int64_t r = state.round + 1;
    const std::size_t d = state.X.rows(), n = state.X.cols();

    // Pre-mix combination (1-eta_c) X + eta_c (X_T - eta_l Y_T), then W_k.
    Matrix pre(d, n);
    kernels::lincomb3(pre.data(), 1.0 - cfg.eta_c, state.X.data(), cfg.eta_c, locals.X_T.data(),
                      -cfg.eta_c * cfg.eta_l, locals.Y_T.data(), pre.size());
    Matrix x_next(d, n);
    apply_mixing(pre, comm, x_next);

    const std::vector<Batch> batches = draw_batches(parts, cfg, r, /*step=*/0);
    Matrix g_next(d, n);
    distributed_stochastic_gradient(oracle, x_next, parts, batches, g_next);

    Matrix y_pre = locals.Y_T;
    kernels::add_diff(y_pre.data(), g_next.data(), locals.G_T.data(), y_pre.size());
    apply_mixing(y_pre, comm, state.Y);

    state.X = std::move(x_next);
    state.G = std::move(g_next);
    state.round = r;
}

RoundOutcome staged_round(NetworkState& state, const ModelOracle& oracle,
                          const PartitionedDataset& parts, const MixingMatrix& w,
                          const RunConfig& cfg) {
    const LocalPhase locals = local_phase(state, oracle, parts, cfg);
    const CommDraw comm = draw_comm_matrix(cfg.p, w, cfg.seed, state.round);
    comm_phase(state, locals, comm, oracle, parts, cfg);
    return {comm.kind, locals.max_tracking_ratio};
}

void compact_round(NetworkState& state, const ModelOracle& oracle,
                   const PartitionedDataset& parts, const CommDraw& comm, const RunConfig& cfg) {
    // The one-shot form still evaluates the local-step gradients at the staged
    // iterates; only the update assembly differs.
    const LocalPhase locals = local_phase(state, oracle, parts, cfg);
    const std::int64_t r = state.round + 1;
    const std::size_t d = state.X.rows(), n = state.X.cols();
    const double eta = cfg.eta();

    Matrix pre = state.X;
    kernels::axpy(-eta * (cfg.T_o + 1), state.Y.data(), pre.data(), pre.size());
    kernels::axpy(-eta, locals.G_sum.data(), pre.data(), pre.size());
    kernels::axpy(eta * cfg.T_o, state.G.data(), pre.data(), pre.size());
    Matrix x_next(d, n);
    apply_mixing(pre, comm, x_next);

    const std::vector<Batch> batches = draw_batches(parts, cfg, r, /*step=*/0);
    Matrix g_next(d, n);
    distributed_stochastic_gradient(oracle, x_next, parts, batches, g_next);

    Matrix y_pre = state.Y;
    kernels::add_diff(y_pre.data(), g_next.data(), state.G.data(), y_pre.size());
    apply_mixing(y_pre, comm, state.Y);

    state.X = std::move(x_next);
    state.G = std::move(g_next);
    state.round = r;
}

void dsgt_round(NetworkState& state, const ModelOracle& oracle, const PartitionedDataset& parts,
                const MixingMatrix& w, const RunConfig& cfg) {
    const std::int64_t r = state.round + 1;
    const std::size_t d = state.X.rows(), n = state.X.cols();
    const double eta = cfg.eta();
    CommDraw gossip{CommKind::gossip, &w};

    Matrix pre = state.X;
    kernels::axpy(-eta, state.Y.data(), pre.data(), pre.size());
    Matrix x_next(d, n);
    apply_mixing(pre, gossip, x_next);

    const std::vector<Batch> batches = draw_batches(parts, cfg, r, /*step=*/0);
    Matrix g_next(d, n);
    distributed_stochastic_gradient(oracle, x_next, parts, batches, g_next);

    // Tracking correction stays un-mixed in the baseline recursion.
    Matrix y_next(d, n);
    apply_mixing(state.Y, gossip, y_next);
    kernels::add_diff(y_next.data(), g_next.data(), state.G.data(), y_next.size());

    state.X = std::move(x_next);
    state.Y = std::move(y_next);
    state.G = std::move(g_next);
    state.round = r;
}

StepSizePlan plan_step_sizes(double alpha, double p, double lambda_p, double L, int T_o,
                             double sigma, std::int64_t b, int n, std::int64_t K,
                             double f_tilde) {
    if (alpha < 1.0) throw ConfigError("plan_step_sizes: alpha must be >= 1");
    if (lambda_p <= 0.0)
        throw AssumptionError("plan_step_sizes: lambda_p must be positive (network-model "
                              "assumption fails; disconnected graph needs p > 0)");
    if (L <= 0.0) throw ConfigError("plan_step_sizes: L must be positive");
    if (p < 0.0 || p > 1.0) throw ConfigError("plan_step_sizes: p out of [0,1]");

    StepSizePlan plan;
    plan.alpha = alpha;
    plan.L = L;
    plan.sigma = sigma;
    const double root = std::sqrt(1.0 + p);
    plan.eta_c = alpha * root * lambda_p;
    plan.eta_l_max = root * lambda_p / (360.0 * alpha * L * (T_o + 1));
    plan.eta_l = plan.eta_l_max;
    plan.K_min = 0.0;

    if (sigma > 0.0) {
        const double s2 = sigma * sigma;
        const double Kd = static_cast<double>(K);
        const double bd = static_cast<double>(b);
        const double term1 = std::sqrt(static_cast<double>(n) * bd * T_o * f_tilde /
                                       ((1.0 + p) * lambda_p * lambda_p * L * s2 * Kd));
        const double term3 = std::cbrt(alpha * alpha * bd * f_tilde /
                                       (root * lambda_p * L * L * s2 * Kd));
        double tuned = std::min(term1, term3);
        if (p < 1.0) {
            const double term2 =
                std::cbrt(root * lambda_p * bd * f_tilde / ((1.0 - p) * L * L * s2 * Kd));
            tuned = std::min(tuned, term2);
        }
        plan.eta_l = std::min(plan.eta_l_max, tuned / (alpha * T_o));

        const double c360 = 360.0;
        const double lp2 = lambda_p * lambda_p;
        const double k1 = c360 * c360 * n * T_o * bd * L * f_tilde / ((1.0 + p) * (1.0 + p) * lp2 * lp2 * s2);
        const double k3 = c360 * c360 * c360 * alpha * alpha * bd * L * f_tilde /
                          ((1.0 + p) * (1.0 + p) * lp2 * lp2 * s2);
        double k_min = std::max(k1, k3);
        if (p < 1.0) {
            const double k2 = c360 * c360 * c360 * bd * L * f_tilde /
                              ((1.0 - p * p) * lp2 * s2);
            k_min = std::max(k_min, k2);
        }
        plan.K_min = k_min;
    }
    return plan;
}

MetricsRow metrics_snapshot(const NetworkState& state, const ModelOracle& oracle,
                            const PartitionedDataset& parts, const Dataset* test_data) {
    MetricsRow row;
    row.round = state.round;

    const std::vector<double> xbar = state.X.row_mean();
    const std::size_t n = parts.parts.size();

    // Full-batch gradient and loss of f at xbar: mean over the per-agent
    // full-batch oracles (equal part sizes make this the global mean).
    std::vector<double> grad_mean(oracle.dim, 0.0), grad_i(oracle.dim);
    double loss_mean = 0.0, acc_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Dataset& part = parts.parts[i];
        Batch full;
        full.idx.resize(part.s);
        for (std::int64_t r = 0; r < part.s; ++r) full.idx[r] = r;
        loss_mean += loss_grad(oracle, xbar, part, full, grad_i);
        kernels::axpy(1.0, grad_i.data(), grad_mean.data(), grad_i.size());
        if (oracle.kind == ModelKind::logistic_ncvx) {
            std::int64_t correct = 0;
            for (std::int64_t r = 0; r < part.s; ++r)
                if ((kernels::dot(part.sample(r), xbar.data(), oracle.dim) >= 0.0 ? 1 : -1) ==
                    part.labels[r])
                    ++correct;
            acc_mean += static_cast<double>(correct) / static_cast<double>(part.s);
        } else {
            acc_mean += evaluate(oracle, xbar, part).accuracy;
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    kernels::scal(inv_n, grad_mean.data(), grad_mean.size());
    row.grad_norm_sq = kernels::sumsq(grad_mean.data(), grad_mean.size());
    row.train_loss = loss_mean * inv_n;
    row.train_acc = acc_mean * inv_n;

    row.consensus_err = state.X.colmean_dev_sq();
    row.tracking_err = state.Y.colmean_dev_sq();
    const std::vector<double> ybar = state.Y.row_mean();
    const std::vector<double> gbar = state.G.row_mean();
    row.tracking_residual = std::sqrt(static_cast<double>(n) *
                                      kernels::sumsq_diff(ybar.data(), gbar.data(), ybar.size()));

    if (test_data && test_data->s > 0)
        row.test_acc = evaluate(oracle, xbar, *test_data).accuracy;
    return row;
}

}  // namespace pisco
