#include "pisco/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pisco/errors.hpp"
#include "pisco/kernels.hpp"

namespace pisco {

namespace {

// log(1 + exp(t)) without overflow; exact to double precision per branch.
double log1pexp(double t) {
    if (t <= -37.0) return std::exp(t);
    if (t <= 18.0) return std::log1p(std::exp(t));
    if (t <= 33.3) return t + std::exp(-t);
    return t;
}

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

}  // namespace

ModelOracle ModelOracle::logistic(std::int64_t dim, double rho) {
    if (rho < 0.0) throw ConfigError("logistic: rho must be nonnegative");
    ModelOracle o;
    o.kind = ModelKind::logistic_ncvx;
    o.dim = dim;
    o.rho = rho;
    return o;
}

ModelOracle ModelOracle::mlp(int n_in, int n_hidden, int n_out) {
    ModelOracle o;
    o.kind = ModelKind::mlp_1hidden;
    o.n_in = n_in;
    o.n_hidden = n_hidden;
    o.n_out = n_out;
    o.dim = std::int64_t(n_hidden) * n_in + n_hidden + std::int64_t(n_out) * n_hidden + n_out;
    return o;
}

Batch draw_minibatch(std::int64_t part_size, std::int64_t b, RngStream stream) {
    if (part_size < 1 || b < 1) throw ConfigError("draw_minibatch: sizes must be positive");
    Batch batch;
    if (b >= part_size) {
        batch.idx.resize(part_size);
        std::iota(batch.idx.begin(), batch.idx.end(), 0);
        return batch;
    }
    batch.idx.resize(b);
    for (auto& i : batch.idx)
        i = static_cast<std::int64_t>(stream.below(static_cast<std::uint64_t>(part_size)));
    return batch;
}

namespace {

double logistic_loss_grad(const ModelOracle& o, std::span<const double> x, const Dataset& data,
                          const Batch& batch, std::span<double> grad) {
    const std::int64_t d = o.dim;
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (const std::int64_t i : batch.idx) {
        const double* a = data.sample(i);
        const double y = data.labels[i];
        const double u = -y * kernels::dot(a, x.data(), d);
        loss += log1pexp(u);
        kernels::axpy(-y * sigmoid(u), a, grad.data(), d);
    }
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    loss *= inv_b;
    kernels::scal(inv_b, grad.data(), d);
    // The regularizer is identical on every sample, so it enters the batch
    // mean with weight one.
    for (std::int64_t l = 0; l < d; ++l) {
        const double xl = x[l];
        const double den = 1.0 + xl * xl;
        loss += o.rho * xl * xl / den;
        grad[l] += o.rho * 2.0 * xl / (den * den);
    }
    return loss;
}

struct MlpView {
    const double* w1;  // h x in, row-major
    const double* c1;  // h
    const double* w2;  // out x h, row-major
    const double* c2;  // out
};

MlpView mlp_view(const ModelOracle& o, const double* x) {
    MlpView v;
    v.w1 = x;
    v.c1 = x + std::int64_t(o.n_hidden) * o.n_in;
    v.w2 = v.c1 + o.n_hidden;
    v.c2 = v.w2 + std::int64_t(o.n_out) * o.n_hidden;
    return v;
}

// Forward pass for one sample; returns the cross-entropy loss. hidden and
// probs are outputs (sized n_hidden / n_out).
double mlp_forward(const ModelOracle& o, const MlpView& v, const double* a, int label,
                   double* hidden, double* probs) {
    for (int h = 0; h < o.n_hidden; ++h)
        hidden[h] = sigmoid(kernels::dot(v.w1 + std::int64_t(h) * o.n_in, a, o.n_in) + v.c1[h]);
    double max_o = -1e300;
    for (int c = 0; c < o.n_out; ++c) {
        probs[c] = kernels::dot(v.w2 + std::int64_t(c) * o.n_hidden, hidden, o.n_hidden) + v.c2[c];
        max_o = std::max(max_o, probs[c]);
    }
    double z = 0.0;
    for (int c = 0; c < o.n_out; ++c) {
        probs[c] = std::exp(probs[c] - max_o);
        z += probs[c];
    }
    const double log_z = std::log(z);
    const double loss = log_z - std::log(probs[label]);
    for (int c = 0; c < o.n_out; ++c) probs[c] /= z;
    return loss;
}

double mlp_loss_grad(const ModelOracle& o, std::span<const double> x, const Dataset& data,
                     const Batch& batch, std::span<double> grad) {
    const MlpView v = mlp_view(o, x.data());
    std::fill(grad.begin(), grad.end(), 0.0);
    double* gw1 = grad.data();
    double* gc1 = gw1 + std::int64_t(o.n_hidden) * o.n_in;
    double* gw2 = gc1 + o.n_hidden;
    double* gc2 = gw2 + std::int64_t(o.n_out) * o.n_hidden;

    std::vector<double> hidden(o.n_hidden), probs(o.n_out), delta_h(o.n_hidden);
    double loss = 0.0;
    for (const std::int64_t i : batch.idx) {
        const double* a = data.sample(i);
        const int label = data.labels[i];
        loss += mlp_forward(o, v, a, label, hidden.data(), probs.data());
        // Output layer: delta_o = probs - onehot(label).
        probs[label] -= 1.0;
        for (int c = 0; c < o.n_out; ++c) {
            kernels::axpy(probs[c], hidden.data(), gw2 + std::int64_t(c) * o.n_hidden, o.n_hidden);
            gc2[c] += probs[c];
        }
        for (int h = 0; h < o.n_hidden; ++h) {
            double s = 0.0;
            for (int c = 0; c < o.n_out; ++c) s += probs[c] * v.w2[std::int64_t(c) * o.n_hidden + h];
            delta_h[h] = s * hidden[h] * (1.0 - hidden[h]);
        }
        for (int h = 0; h < o.n_hidden; ++h) {
            kernels::axpy(delta_h[h], a, gw1 + std::int64_t(h) * o.n_in, o.n_in);
            gc1[h] += delta_h[h];
        }
    }
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    kernels::scal(inv_b, grad.data(), o.dim);
    return loss * inv_b;
}

}  // namespace

double loss_grad(const ModelOracle& oracle, std::span<const double> x, const Dataset& data,
                 const Batch& batch, std::span<double> grad) {
    if (static_cast<std::int64_t>(x.size()) != oracle.dim ||
        static_cast<std::int64_t>(grad.size()) != oracle.dim)
        throw ConfigError("loss_grad: parameter dimension mismatch");
    if (oracle.kind == ModelKind::logistic_ncvx && data.d != oracle.dim)
        throw ConfigError("loss_grad: feature width does not match logistic dimension");
    if (oracle.kind == ModelKind::mlp_1hidden && data.d != oracle.n_in)
        throw ConfigError("loss_grad: feature width does not match MLP input size");
    if (batch.size() == 0) throw ConfigError("loss_grad: empty batch");
    return oracle.kind == ModelKind::logistic_ncvx
               ? logistic_loss_grad(oracle, x, data, batch, grad)
               : mlp_loss_grad(oracle, x, data, batch, grad);
}

void distributed_stochastic_gradient(const ModelOracle& oracle, const Matrix& X,
                                     const PartitionedDataset& parts,
                                     const std::vector<Batch>& batches, Matrix& G) {
    const std::size_t n = parts.parts.size();
    if (X.cols() != n || batches.size() != n)
        throw ConfigError("distributed gradient: agent count mismatch");
    if (G.rows() != X.rows() || G.cols() != n) G = Matrix(X.rows(), n);
    for (std::size_t i = 0; i < n; ++i) {
        loss_grad(oracle, std::span<const double>(X.col(i), X.rows()), parts.parts[i],
                  batches[i], std::span<double>(G.col(i), G.rows()));
    }
}

EvalResult evaluate(const ModelOracle& oracle, std::span<const double> x, const Dataset& data) {
    if (data.s == 0) throw DataError("evaluate: empty dataset");
    Batch full;
    full.idx.resize(data.s);
    std::iota(full.idx.begin(), full.idx.end(), 0);

    EvalResult r;
    std::int64_t correct = 0;
    if (oracle.kind == ModelKind::logistic_ncvx) {
        std::vector<double> grad(oracle.dim);
        r.loss = loss_grad(oracle, x, data, full, grad);
        for (std::int64_t i = 0; i < data.s; ++i) {
            const double score = kernels::dot(data.sample(i), x.data(), oracle.dim);
            const int pred = score >= 0.0 ? 1 : -1;  // zero counted as +1
            if (pred == data.labels[i]) ++correct;
        }
    } else {
        const MlpView v = mlp_view(oracle, x.data());
        std::vector<double> hidden(oracle.n_hidden), probs(oracle.n_out);
        double loss = 0.0;
        for (std::int64_t i = 0; i < data.s; ++i) {
            loss += mlp_forward(oracle, v, data.sample(i), data.labels[i], hidden.data(),
                                probs.data());
            int arg = 0;
            for (int c = 1; c < oracle.n_out; ++c)
                if (probs[c] > probs[arg]) arg = c;  // strict: ties keep lowest index
            if (arg == data.labels[i]) ++correct;
        }
        r.loss = loss / static_cast<double>(data.s);
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(data.s);
    return r;
}

std::vector<double> init_params(const ModelOracle& oracle, std::uint64_t seed) {
    std::vector<double> x(oracle.dim, 0.0);
    if (oracle.kind == ModelKind::mlp_1hidden) {
        RngStream stream = RngStream::keyed(seed, StreamPurpose::param_init);
        double* p = x.data();
        const double s1 = 1.0 / std::sqrt(static_cast<double>(oracle.n_in));
        for (std::int64_t i = 0; i < std::int64_t(oracle.n_hidden) * oracle.n_in; ++i)
            *p++ = s1 * stream.normal();
        p += oracle.n_hidden;  // c1 stays zero
        const double s2 = 1.0 / std::sqrt(static_cast<double>(oracle.n_hidden));
        for (std::int64_t i = 0; i < std::int64_t(oracle.n_out) * oracle.n_hidden; ++i)
            *p++ = s2 * stream.normal();
    }
    return x;
}

double logistic_smoothness(const PartitionedDataset& parts, double rho) {
    double max_sq = 0.0;
    for (const Dataset& part : parts.parts)
        for (std::int64_t i = 0; i < part.s; ++i)
            max_sq = std::max(max_sq, kernels::sumsq(part.sample(i), part.d));
    return 0.25 * max_sq + 2.0 * rho;
}

}  // namespace pisco
