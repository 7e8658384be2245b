#include "tempshift/model.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "tempshift/kernels.hpp"
#include "tempshift/rng.hpp"

namespace tempshift {

std::string model_kind_str(ModelKind k) {
    return k == ModelKind::Linear ? "linear" : "mlp";
}

ModelKind model_kind_from_str(const std::string& s) {
    if (s == "linear") return ModelKind::Linear;
    if (s == "mlp") return ModelKind::Mlp;
    throw std::invalid_argument("unknown model kind: '" + s + "'");
}

PredictorState init_predictor(ModelKind kind, const std::vector<std::size_t>& dims,
                              std::uint64_t seed, double dropout) {
    if (dims.size() < 2)
        throw std::invalid_argument("init_predictor: dims needs input and output widths");
    if (kind == ModelKind::Linear && dims.size() != 2)
        throw std::invalid_argument("init_predictor: linear model takes dims [d_in, 1]");
    if (kind == ModelKind::Mlp && dims.size() < 3)
        throw std::invalid_argument("init_predictor: mlp needs at least one hidden layer");
    if (dims.back() != 1)
        throw std::invalid_argument("init_predictor: output width must be 1");
    for (std::size_t d : dims)
        if (d == 0) throw std::invalid_argument("init_predictor: zero-width layer");
    if (dropout < 0.0 || dropout >= 1.0)
        throw std::invalid_argument("init_predictor: dropout must be in [0, 1)");

    PredictorState s;
    s.kind = kind;
    s.dims = dims;
    s.dropout = dropout;
    Rng rng(Rng::derive(seed, "model-init"));
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const std::size_t fan_in = dims[l];
        const std::size_t fan_out = dims[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Matrix W(fan_out, fan_in);
        for (double& w : W.data) w = rng.uniform(-bound, bound);
        std::vector<double> b(fan_out);
        for (double& v : b) v = rng.uniform(-bound, bound);
        s.W.push_back(std::move(W));
        s.b.push_back(std::move(b));
    }
    return s;
}

std::vector<double> forward(const PredictorState& state, const Matrix& X,
                            bool train_mode, ForwardCache* cache,
                            std::uint64_t dropout_seed) {
    if (X.cols != state.d_in())
        throw std::invalid_argument("forward: input width " + std::to_string(X.cols) +
                                    " does not match d_in " + std::to_string(state.d_in()));
    if (train_mode && !cache)
        throw std::invalid_argument("forward: train mode requires a cache");

    const std::size_t n_layers = state.n_layers();
    const bool use_dropout = train_mode && state.dropout > 0.0;
    Rng drop_rng(Rng::derive(dropout_seed, "dropout"));

    if (cache) {
        cache->input = X;
        cache->pre.clear();
        cache->act.clear();
        cache->mask.clear();
    }

    Matrix cur = X;
    for (std::size_t l = 0; l < n_layers; ++l) {
        Matrix pre;
        kernels::linear_forward(cur, state.W[l], state.b[l], pre);
        const bool hidden = l + 1 < n_layers;
        if (hidden) {
            Matrix act(pre.rows, pre.cols);
            for (std::size_t i = 0; i < pre.data.size(); ++i)
                act.data[i] = pre.data[i] > 0 ? pre.data[i] : 0.0;
            Matrix mask;
            if (use_dropout) {
                // Inverted dropout: surviving units are scaled by 1/(1-p) so
                // eval mode needs no rescaling.
                mask = Matrix(pre.rows, pre.cols);
                const double keep_scale = 1.0 / (1.0 - state.dropout);
                for (double& m : mask.data)
                    m = drop_rng.uniform01() >= state.dropout ? keep_scale : 0.0;
                for (std::size_t i = 0; i < act.data.size(); ++i)
                    act.data[i] *= mask.data[i];
            }
            if (cache) {
                cache->pre.push_back(std::move(pre));
                cache->act.push_back(act);
                cache->mask.push_back(std::move(mask));
            }
            cur = std::move(act);
        } else {
            if (cache) cache->pre.push_back(pre);
            cur = std::move(pre);
        }
    }
    return cur.data; // n x 1
}

LossGrads loss_and_grad(const PredictorState& state, const Matrix& X,
                        const std::vector<double>& y, Task task,
                        std::uint64_t dropout_seed) {
    const std::size_t n = X.rows;
    if (n == 0) throw std::invalid_argument("loss_and_grad: empty batch");
    if (y.size() != n) throw std::invalid_argument("loss_and_grad: label count mismatch");
    if (task == Task::Classification)
        for (double v : y)
            if (v != 0.0 && v != 1.0)
                throw std::invalid_argument(
                    "loss_and_grad: classification labels must be 0 or 1");

    ForwardCache cache;
    const std::vector<double> z = forward(state, X, true, &cache, dropout_seed);

    LossGrads out;
    Matrix dZ(n, 1);
    const double inv_n = 1.0 / static_cast<double>(n);
    if (task == Task::Classification) {
        for (std::size_t i = 0; i < n; ++i) {
            const double zi = z[i];
            out.loss += std::max(zi, 0.0) - zi * y[i] + std::log1p(std::exp(-std::abs(zi)));
            const double sig = 1.0 / (1.0 + std::exp(-zi));
            dZ(i, 0) = (sig - y[i]) * inv_n;
        }
        out.loss *= inv_n;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = z[i] - y[i];
            out.loss += diff * diff;
            dZ(i, 0) = 2.0 * diff * inv_n;
        }
        out.loss *= inv_n;
    }

    const std::size_t n_layers = state.n_layers();
    out.dW.resize(n_layers);
    out.db.resize(n_layers);
    Matrix d_out = std::move(dZ);
    for (std::size_t l = n_layers; l-- > 0;) {
        const Matrix& layer_in = l == 0 ? cache.input : cache.act[l - 1];
        kernels::linear_backward_params(d_out, layer_in, out.dW[l], out.db[l]);
        Matrix d_in;
        kernels::linear_backward_input(d_out, state.W[l], d_in);
        if (l > 0) {
            const Matrix& mask = cache.mask[l - 1];
            const Matrix& pre = cache.pre[l - 1];
            if (!mask.data.empty())
                for (std::size_t i = 0; i < d_in.data.size(); ++i)
                    d_in.data[i] *= mask.data[i];
            for (std::size_t i = 0; i < d_in.data.size(); ++i)
                if (pre.data[i] <= 0) d_in.data[i] = 0.0;
        }
        d_out = std::move(d_in);
    }
    out.dX = std::move(d_out);
    return out;
}

Matrix penultimate_representation(const PredictorState& state, const Matrix& X) {
    if (state.kind != ModelKind::Mlp)
        throw std::invalid_argument(
            "penultimate_representation: model has no hidden stack");
    if (X.cols != state.d_in())
        throw std::invalid_argument("penultimate_representation: input width mismatch");

    Matrix cur = X;
    for (std::size_t l = 0; l + 1 < state.n_layers(); ++l) {
        Matrix pre;
        kernels::linear_forward(cur, state.W[l], state.b[l], pre);
        for (double& v : pre.data) v = v > 0 ? v : 0.0;
        cur = std::move(pre);
    }
    return cur;
}

std::string predictor_to_json(const PredictorState& state) {
    nlohmann::json j;
    j["kind"] = model_kind_str(state.kind);
    j["dims"] = state.dims;
    j["dropout"] = state.dropout;
    for (std::size_t l = 0; l < state.n_layers(); ++l) {
        j["weights"].push_back(state.W[l].data);
        j["biases"].push_back(state.b[l]);
    }
    return j.dump();
}

PredictorState predictor_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    PredictorState s;
    s.kind = model_kind_from_str(j.at("kind").get<std::string>());
    s.dims = j.at("dims").get<std::vector<std::size_t>>();
    s.dropout = j.at("dropout").get<double>();
    const auto& weights = j.at("weights");
    const auto& biases = j.at("biases");
    if (weights.size() + 1 != s.dims.size())
        throw std::invalid_argument("predictor_from_json: layer count mismatch");
    for (std::size_t l = 0; l + 1 < s.dims.size(); ++l) {
        Matrix W(s.dims[l + 1], s.dims[l], weights[l].get<std::vector<double>>());
        std::vector<double> b = biases[l].get<std::vector<double>>();
        if (b.size() != s.dims[l + 1])
            throw std::invalid_argument("predictor_from_json: bias length mismatch");
        s.W.push_back(std::move(W));
        s.b.push_back(std::move(b));
    }
    return s;
}

} // namespace tempshift
