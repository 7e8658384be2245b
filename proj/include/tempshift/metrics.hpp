#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tempshift/dataset.hpp"

namespace tempshift {

/// One evaluated (method, split, dataset, seed) cell.
struct ScoreRow {
    std::string method;
    std::string split;
    std::string dataset;
    Task task = Task::Regression;
    std::uint64_t seed = 0;
    double value = 0.0; // AUC for classification, RMSE for regression
};

/// Area under the ROC curve via the Mann-Whitney rank statistic with midrank
/// ties: (#concordant + 0.5 * #tied) / (#pos * #neg).
/// Throws std::invalid_argument when only one class is present.
double auc(const std::vector<double>& scores, const std::vector<double>& labels);

/// Root mean squared error. Throws std::invalid_argument on empty or
/// mismatched inputs.
double rmse(const std::vector<double>& preds, const std::vector<double>& targets);

/// Signed percent change where positive always means better:
/// classification (new - base) / base * 100; regression (base - new) / base * 100.
/// Throws std::invalid_argument when base <= 0.
double pct_improvement(double base, double next, Task task);

/// Arithmetic mean of per-dataset pct_improvement values.
double mean_improvement(const std::vector<double>& base,
                        const std::vector<double>& next, Task task);

/// Mean after dropping exactly one maximum and one minimum occurrence.
/// Throws std::invalid_argument for fewer than 3 values.
double robust_average(const std::vector<double>& values);

/// RS_k = mu - k * sigma.
double robustness_score(double mu, double sigma, double k);

/// Population mean and standard deviation.
std::pair<double, double> mean_std(const std::vector<double>& values);

/// Per-slice mean of `per_instance_losses` (aligned to dataset rows), with
/// empty slices linearly interpolated from their nearest non-empty
/// neighbors, then smoothed by a normalized discrete Gaussian of
/// `smoothing_sigma` slices (kernel truncated at 4*sigma, symmetric
/// reflective padding). sigma = 0 returns the raw per-slice means.
/// Throws std::invalid_argument when every slice is empty.
std::vector<double> loss_over_time(const std::vector<double>& per_instance_losses,
                                   const TimeSliceIndex& slices,
                                   double smoothing_sigma = 2.0);

} // namespace tempshift
