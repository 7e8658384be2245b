#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tempshift/dataset.hpp"
#include "tempshift/embedding.hpp"
#include "tempshift/model.hpp"
#include "tempshift/splitting.hpp"

namespace tempshift {

struct TrainConfig {
    double learning_rate = 1e-3;
    double weight_decay = 1e-4;
    std::size_t batch_size = 1024;
    std::size_t patience = 16;
    std::size_t max_epochs = 200;
    std::uint64_t seed = 0;
};

/// One mutable parameter array paired with its gradient.
struct ParamView {
    double* data = nullptr;
    const double* grad = nullptr;
    std::size_t size = 0;
};

/// Decoupled-weight-decay Adam: beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
struct AdamWState {
    std::vector<std::vector<double>> m, v;
    std::size_t step = 0;
    static constexpr double beta1 = 0.9;
    static constexpr double beta2 = 0.999;
    static constexpr double eps = 1e-8;
};

/// One update over every view: m <- b1 m + (1-b1) g; v <- b2 v + (1-b2) g^2;
/// theta <- theta - lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta), with
/// bias-corrected m_hat, v_hat. Accumulators are allocated on first use and
/// must keep matching shapes afterwards.
void adamw_step(const std::vector<ParamView>& views, AdamWState& state, double lr,
                double wd);

/// Patience counter with strict-improvement snapshots (ties do not reset).
class EarlyStopper {
public:
    EarlyStopper(bool higher_is_better, std::size_t patience);
    /// Record one epoch's metric; returns true when it strictly improves.
    bool observe(double metric);
    bool should_stop() const { return since_best_ >= patience_; }
    std::size_t best_epoch() const { return best_epoch_; }
    double best_metric() const { return best_metric_; }

private:
    bool higher_better_;
    std::size_t patience_;
    std::size_t epoch_ = 0;
    std::size_t since_best_ = 0;
    std::size_t best_epoch_ = 0;
    double best_metric_ = 0.0;
    bool seen_any_ = false;
};

struct EpochRecord {
    double train_loss = 0.0;
    double val_metric = 0.0;
};

struct FitResult {
    PredictorState best_model;
    EncoderParams best_encoder;
    std::size_t best_epoch = 0;
    double best_val_metric = 0.0;
    std::vector<EpochRecord> history;
    std::string stop_reason; // "patience" or "max_epochs"
};

/// Feature columns of `rows` with the encoded timestamps appended as the
/// trailing columns (width = ds features + encoder output width).
Matrix assemble_input(const TemporalDataset& ds, const std::vector<std::size_t>& rows,
                      const TemporalEncoderConfig& enc_cfg,
                      const EncoderParams& enc_params, EncoderCache* cache = nullptr);

/// AdamW training with per-epoch validation selection. Expects `ds` already
/// standardized with statistics fitted on plan.train (the standardizer is
/// passed so regression validation RMSE is computed in label units). Each
/// epoch: seeded shuffle of train rows, sequential batches (last partial
/// batch kept), joint updates of model and trainable encoder parameters;
/// snapshot on strict val improvement (AUC up / RMSE down); stop after
/// `patience` epochs without improvement or at max_epochs. Throws
/// std::runtime_error with epoch/batch context if the loss turns non-finite.
FitResult train(const PredictorState& model, const TemporalEncoderConfig& enc_cfg,
                const EncoderParams& encoder, const TemporalDataset& ds,
                const SplitPlan& plan, const TrainConfig& cfg,
                const Standardizer& standardizer);

/// Eval-mode predictions for `rows`: probabilities for classification,
/// de-standardized values for regression.
std::vector<double> predict(const PredictorState& model,
                            const TemporalEncoderConfig& enc_cfg,
                            const EncoderParams& encoder, const TemporalDataset& ds,
                            const std::vector<std::size_t>& rows,
                            const Standardizer& standardizer);

/// Per-row losses for diagnostics curves: squared error in label units for
/// regression, binary cross-entropy for classification.
std::vector<double> per_sample_losses(const PredictorState& model,
                                      const TemporalEncoderConfig& enc_cfg,
                                      const EncoderParams& encoder,
                                      const TemporalDataset& ds,
                                      const std::vector<std::size_t>& rows,
                                      const Standardizer& standardizer);

/// FitResult as JSON: history arrays, best epoch/metric, stop reason, config.
std::string fit_result_to_json(const FitResult& fit, const TrainConfig& cfg);

} // namespace tempshift
