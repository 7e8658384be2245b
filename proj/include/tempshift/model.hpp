#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tempshift/dataset.hpp"
#include "tempshift/matrix.hpp"

namespace tempshift {

enum class ModelKind { Linear, Mlp };

std::string model_kind_str(ModelKind k);
ModelKind model_kind_from_str(const std::string& s);

/// Weights of a linear or MLP predictor. dims = [d_in, h_1, ..., h_L, 1];
/// hidden layers use ReLU and (train-time) inverted dropout. Output width is
/// always 1: a logit for classification, a standardized value for regression.
struct PredictorState {
    ModelKind kind = ModelKind::Linear;
    std::vector<std::size_t> dims;
    std::vector<Matrix> W;               // per layer, dims[l+1] x dims[l]
    std::vector<std::vector<double>> b;  // per layer, dims[l+1]
    double dropout = 0.0;

    std::size_t n_layers() const { return W.size(); }
    std::size_t d_in() const { return dims.front(); }
};

/// Seeded fan-in uniform init (U[-1/sqrt(fan_in), +1/sqrt(fan_in)] for both
/// weights and biases). Linear kind requires dims [d_in, 1]; mlp requires at
/// least one hidden layer. Deterministic per seed.
PredictorState init_predictor(ModelKind kind, const std::vector<std::size_t>& dims,
                              std::uint64_t seed, double dropout = 0.0);

/// Per-batch intermediates captured by a train-mode forward pass.
struct ForwardCache {
    Matrix input;
    std::vector<Matrix> pre;   // pre-activations per layer
    std::vector<Matrix> act;   // post-ReLU(+dropout) activations per hidden layer
    std::vector<Matrix> mask;  // inverted-dropout masks per hidden layer (may be empty)
};

/// Batch forward pass; returns one output per row. Dropout masks are drawn
/// only when train_mode is set and state.dropout > 0, seeded by dropout_seed
/// so the pass is reproducible. cache must be provided iff train_mode.
std::vector<double> forward(const PredictorState& state, const Matrix& X,
                            bool train_mode, ForwardCache* cache = nullptr,
                            std::uint64_t dropout_seed = 0);

struct LossGrads {
    double loss = 0.0;
    std::vector<Matrix> dW;
    std::vector<std::vector<double>> db;
    Matrix dX; // n x d_in, gradient wrt the input matrix
};

/// Training loss and full gradient for one batch. Classification: mean
/// binary cross-entropy on logits in the overflow-safe form
/// max(z,0) - z*y + log1p(exp(-|z|)). Regression: mean squared error on
/// standardized targets. The input gradient dX is exposed so a learnable
/// temporal encoder attached as extra columns can train through the model.
LossGrads loss_and_grad(const PredictorState& state, const Matrix& X,
                        const std::vector<double>& y, Task task,
                        std::uint64_t dropout_seed = 0);

/// Activations after the last hidden layer (eval mode, no dropout).
/// Throws std::invalid_argument for linear models, which have no hidden stack.
Matrix penultimate_representation(const PredictorState& state, const Matrix& X);

/// JSON checkpoint round trip (dims header + per-layer weights).
std::string predictor_to_json(const PredictorState& state);
PredictorState predictor_from_json(const std::string& text);

} // namespace tempshift
