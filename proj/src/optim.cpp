#include "tempshift/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "tempshift/metrics.hpp"
#include "tempshift/rng.hpp"

namespace tempshift {

void adamw_step(const std::vector<ParamView>& views, AdamWState& state, double lr,
                double wd) {
    if (state.m.empty()) {
        state.m.resize(views.size());
        state.v.resize(views.size());
        for (std::size_t i = 0; i < views.size(); ++i) {
            state.m[i].assign(views[i].size, 0.0);
            state.v[i].assign(views[i].size, 0.0);
        }
    }
    if (state.m.size() != views.size())
        throw std::invalid_argument("adamw_step: view count changed");

    ++state.step;
    const double b1 = AdamWState::beta1;
    const double b2 = AdamWState::beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < views.size(); ++i) {
        const ParamView& pv = views[i];
        if (state.m[i].size() != pv.size)
            throw std::invalid_argument("adamw_step: parameter shape changed");
        for (std::size_t j = 0; j < pv.size; ++j) {
            const double g = pv.grad[j];
            state.m[i][j] = b1 * state.m[i][j] + (1.0 - b1) * g;
            state.v[i][j] = b2 * state.v[i][j] + (1.0 - b2) * g * g;
            const double m_hat = state.m[i][j] / bc1;
            const double v_hat = state.v[i][j] / bc2;
            pv.data[j] -= lr * (m_hat / (std::sqrt(v_hat) + AdamWState::eps) +
                                wd * pv.data[j]);
        }
    }
}

EarlyStopper::EarlyStopper(bool higher_is_better, std::size_t patience)
    : higher_better_(higher_is_better), patience_(patience) {
    if (patience_ < 1) throw std::invalid_argument("EarlyStopper: patience must be >= 1");
}

bool EarlyStopper::observe(double metric) {
    const bool improved =
        !seen_any_ || (higher_better_ ? metric > best_metric_ : metric < best_metric_);
    if (improved) {
        seen_any_ = true;
        best_metric_ = metric;
        best_epoch_ = epoch_;
        since_best_ = 0;
    } else {
        ++since_best_; // ties count as non-improvements
    }
    ++epoch_;
    return improved;
}

Matrix assemble_input(const TemporalDataset& ds, const std::vector<std::size_t>& rows,
                      const TemporalEncoderConfig& enc_cfg,
                      const EncoderParams& enc_params, EncoderCache* cache) {
    const std::size_t d = ds.n_features();
    const std::size_t w = enc_cfg.output_width();
    Matrix X(rows.size(), d + w);
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy_n(ds.features.row_ptr(rows[i]), d, X.row_ptr(i));
    if (w > 0) {
        std::vector<std::int64_t> ts(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) ts[i] = ds.timestamps[rows[i]];
        const Matrix emb = encode_batch(ts, enc_cfg, enc_params, cache);
        for (std::size_t i = 0; i < rows.size(); ++i)
            std::copy_n(emb.row_ptr(i), w, X.row_ptr(i) + d);
    }
    return X;
}

namespace {

bool encoder_trainable(const TemporalEncoderConfig& cfg) {
    return cfg.mode == EncoderMode::Fourier &&
           (cfg.d_embedding > 0 || cfg.learnable_frequencies);
}

std::vector<ParamView> build_views(PredictorState& model,
                                   const std::vector<Matrix>& dW,
                                   const std::vector<std::vector<double>>& db,
                                   const TemporalEncoderConfig& enc_cfg,
                                   EncoderParams& enc, const EncoderGrads& eg) {
    std::vector<ParamView> views;
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        views.push_back({model.W[l].data.data(), dW[l].data.data(), dW[l].data.size()});
        views.push_back({model.b[l].data(), db[l].data(), db[l].size()});
    }
    if (encoder_trainable(enc_cfg)) {
        if (enc_cfg.d_embedding > 0) {
            views.push_back({enc.W.data.data(), eg.dW.data.data(), eg.dW.data.size()});
            views.push_back({enc.b.data(), eg.db.data(), eg.db.size()});
        }
        if (enc_cfg.learnable_frequencies)
            views.push_back({enc.frequencies.data(), eg.dfrequencies.data(),
                             eg.dfrequencies.size()});
    }
    return views;
}

double validation_metric(const PredictorState& model,
                         const TemporalEncoderConfig& enc_cfg,
                         const EncoderParams& enc, const TemporalDataset& ds,
                         const std::vector<std::size_t>& val_rows,
                         const Standardizer& standardizer) {
    const std::vector<double> preds =
        predict(model, enc_cfg, enc, ds, val_rows, standardizer);
    std::vector<double> targets(val_rows.size());
    if (ds.task == Task::Classification) {
        for (std::size_t i = 0; i < val_rows.size(); ++i)
            targets[i] = ds.labels[val_rows[i]];
        return auc(preds, targets);
    }
    for (std::size_t i = 0; i < val_rows.size(); ++i)
        targets[i] = standardizer.destandardize_label(ds.labels[val_rows[i]]);
    return rmse(preds, targets);
}

} // namespace

FitResult train(const PredictorState& model, const TemporalEncoderConfig& enc_cfg,
                const EncoderParams& encoder, const TemporalDataset& ds,
                const SplitPlan& plan, const TrainConfig& cfg,
                const Standardizer& standardizer) {
    if (plan.train_idx.empty() || plan.val_idx.empty())
        throw std::invalid_argument("train: empty train or val set");
    if (cfg.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
    if (cfg.max_epochs < 1) throw std::invalid_argument("train: max_epochs must be >= 1");
    const std::size_t d_in = ds.n_features() + enc_cfg.output_width();
    if (model.d_in() != d_in)
        throw std::invalid_argument("train: model d_in " + std::to_string(model.d_in()) +
                                    " does not match features+embedding width " +
                                    std::to_string(d_in));

    PredictorState cur_model = model;
    EncoderParams cur_enc = encoder;
    const bool enc_train = encoder_trainable(enc_cfg);

    AdamWState opt;
    const bool higher_better = ds.task == Task::Classification;
    EarlyStopper stopper(higher_better, cfg.patience);

    FitResult fit;
    fit.best_model = cur_model;
    fit.best_encoder = cur_enc;
    fit.stop_reason = "max_epochs";

    const std::uint64_t shuffle_root = Rng::derive(cfg.seed, "epoch-shuffle");
    const std::uint64_t dropout_root = Rng::derive(cfg.seed, "dropout-stream");
    const std::size_t n_train = plan.train_idx.size();
    const std::size_t d_feat = ds.n_features();

    std::vector<std::size_t> order = plan.train_idx;
    std::vector<std::size_t> batch_rows;
    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        Rng epoch_rng(Rng::derive(shuffle_root, epoch));
        order = plan.train_idx;
        epoch_rng.shuffle(order);

        double epoch_loss = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n_train; start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, n_train);
            batch_rows.assign(order.begin() + start, order.begin() + end);

            EncoderCache enc_cache;
            const Matrix X = assemble_input(ds, batch_rows, enc_cfg, cur_enc,
                                            enc_train ? &enc_cache : nullptr);
            std::vector<double> y(batch_rows.size());
            for (std::size_t i = 0; i < batch_rows.size(); ++i)
                y[i] = ds.labels[batch_rows[i]];

            const std::uint64_t drop_seed =
                Rng::derive(dropout_root, epoch * 1000003ULL + batch_index);
            const LossGrads g = loss_and_grad(cur_model, X, y, ds.task, drop_seed);
            if (!std::isfinite(g.loss))
                throw std::runtime_error(
                    "train: non-finite loss at epoch " + std::to_string(epoch) +
                    ", batch " + std::to_string(batch_index) +
                    " (lr=" + std::to_string(cfg.learning_rate) + ")");
            epoch_loss += g.loss * static_cast<double>(batch_rows.size());

            EncoderGrads eg;
            if (enc_train) {
                // Slice the input gradient down to the embedding columns.
                const std::size_t w = enc_cfg.output_width();
                Matrix d_emb(batch_rows.size(), w);
                for (std::size_t i = 0; i < batch_rows.size(); ++i)
                    std::copy_n(g.dX.row_ptr(i) + d_feat, w, d_emb.row_ptr(i));
                eg = encoder_backward(d_emb, enc_cfg, cur_enc, enc_cache);
            }
            const auto views = build_views(cur_model, g.dW, g.db, enc_cfg, cur_enc, eg);
            adamw_step(views, opt, cfg.learning_rate, cfg.weight_decay);
            ++batch_index;
        }

        const double val =
            validation_metric(cur_model, enc_cfg, cur_enc, ds, plan.val_idx, standardizer);
        fit.history.push_back({epoch_loss / static_cast<double>(n_train), val});
        if (stopper.observe(val)) {
            fit.best_model = cur_model;
            fit.best_encoder = cur_enc;
            fit.best_epoch = epoch;
            fit.best_val_metric = val;
        }
        if (stopper.should_stop()) {
            fit.stop_reason = "patience";
            break;
        }
    }
    return fit;
}

std::vector<double> predict(const PredictorState& model,
                            const TemporalEncoderConfig& enc_cfg,
                            const EncoderParams& encoder, const TemporalDataset& ds,
                            const std::vector<std::size_t>& rows,
                            const Standardizer& standardizer) {
    const Matrix X = assemble_input(ds, rows, enc_cfg, encoder);
    std::vector<double> out = forward(model, X, false);
    if (ds.task == Task::Classification) {
        for (double& z : out) z = 1.0 / (1.0 + std::exp(-z));
    } else {
        for (double& z : out) z = standardizer.destandardize_label(z);
    }
    return out;
}

std::vector<double> per_sample_losses(const PredictorState& model,
                                      const TemporalEncoderConfig& enc_cfg,
                                      const EncoderParams& encoder,
                                      const TemporalDataset& ds,
                                      const std::vector<std::size_t>& rows,
                                      const Standardizer& standardizer) {
    const std::vector<double> preds =
        predict(model, enc_cfg, encoder, ds, rows, standardizer);
    std::vector<double> losses(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double y_raw = ds.labels[rows[i]];
        if (ds.task == Task::Classification) {
            // Cross-entropy on the predicted probability, clamped for safety.
            const double p = std::min(std::max(preds[i], 1e-12), 1.0 - 1e-12);
            losses[i] = y_raw == 1.0 ? -std::log(p) : -std::log1p(-p);
        } else {
            const double y = standardizer.destandardize_label(y_raw);
            const double d = preds[i] - y;
            losses[i] = d * d;
        }
    }
    return losses;
}

std::string fit_result_to_json(const FitResult& fit, const TrainConfig& cfg) {
    nlohmann::json j;
    j["best_epoch"] = fit.best_epoch;
    j["best_val_metric"] = fit.best_val_metric;
    j["stop_reason"] = fit.stop_reason;
    j["epochs_run"] = fit.history.size();
    for (const auto& rec : fit.history) {
        j["history"]["train_loss"].push_back(rec.train_loss);
        j["history"]["val_metric"].push_back(rec.val_metric);
    }
    j["config"] = {{"learning_rate", cfg.learning_rate},
                   {"weight_decay", cfg.weight_decay},
                   {"batch_size", cfg.batch_size},
                   {"patience", cfg.patience},
                   {"max_epochs", cfg.max_epochs},
                   {"seed", cfg.seed}};
    return j.dump(2);
}

} // namespace tempshift
