#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pisco/dataio.hpp"
#include "pisco/matrix.hpp"
#include "pisco/rng.hpp"

namespace pisco {

enum class ModelKind { logistic_ncvx, mlp_1hidden };

// Loss/gradient evaluator description. logistic_ncvx is binary logistic
// regression with the bounded nonconvex regularizer rho * sum x_l^2/(1+x_l^2);
// mlp_1hidden is a sigmoid-hidden, softmax-output network trained with
// cross-entropy. The MLP parameter layout is W1 row-major, c1, W2 row-major, c2.
struct ModelOracle {
    ModelKind kind = ModelKind::logistic_ncvx;
    std::int64_t dim = 0;
    double rho = 0.0;                       // logistic only
    int n_in = 0, n_hidden = 0, n_out = 0;  // mlp only

    static ModelOracle logistic(std::int64_t dim, double rho);
    static ModelOracle mlp(int n_in, int n_hidden, int n_out);
};

struct Batch {
    std::vector<std::int64_t> idx;

    std::int64_t size() const { return static_cast<std::int64_t>(idx.size()); }
};

// b >= part_size switches to full-batch mode: every index exactly once, in
// order (deterministic gradients, sigma = 0). Otherwise b i.i.d. uniform
// draws with replacement from the keyed stream.
Batch draw_minibatch(std::int64_t part_size, std::int64_t b, RngStream stream);

// Mean loss and mean gradient over the batch; grad must have oracle.dim slots.
double loss_grad(const ModelOracle& oracle, std::span<const double> x, const Dataset& data,
                 const Batch& batch, std::span<double> grad);

// Column i of G <- batch gradient of agent i at X column i.
void distributed_stochastic_gradient(const ModelOracle& oracle, const Matrix& X,
                                     const PartitionedDataset& parts,
                                     const std::vector<Batch>& batches, Matrix& G);

struct EvalResult {
    double loss = 0.0;
    double accuracy = 0.0;
};

// Full-data mean loss and accuracy. Logistic predicts sign(a'x) with ties to
// +1; the MLP predicts the argmax class with lowest-index tie-break.
EvalResult evaluate(const ModelOracle& oracle, std::span<const double> x, const Dataset& data);

// Initial parameter vector: zeros for logistic, scaled 1/sqrt(fan-in) normals
// for the MLP (biases zero), drawn from the seed's init stream.
std::vector<double> init_params(const ModelOracle& oracle, std::uint64_t seed);

// Analytic smoothness bound for the logistic task: 0.25 * max ||a||^2 + 2 rho.
double logistic_smoothness(const PartitionedDataset& parts, double rho);

}  // namespace pisco
