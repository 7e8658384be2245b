#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tempshift/dataset.hpp"

namespace tempshift {

struct PeriodicComponent {
    std::int64_t period = 0; // seconds, > 0
    double amplitude = 0.0;
    double phase = 0.0; // radians
};

/// Recipe for a temporal tabular dataset with a known ground-truth signal:
///   signal(t, x) = w.x + trend_coeff*(t-start)/(end-start)
///                + sum_j amplitude_j * sin(2*pi*t/period_j + phase_j)
/// Regression labels add Normal(0, noise_std); classification labels
/// threshold signal+noise at the median signal (balanced classes).
struct SynthConfig {
    std::size_t n = 1000; // >= 10
    std::size_t d = 4;
    std::vector<double> w; // length d
    double trend_coeff = 0.0;
    std::vector<PeriodicComponent> components;
    double noise_std = 0.0;
    std::int64_t start = 0; // span sampled uniformly, end > start
    std::int64_t end = 0;
    Task task = Task::Regression;
    std::uint64_t seed = 0;
};

/// Stable hash of every config field; generate() stamps it on the dataset so
/// oracle queries can detect a config/dataset mismatch.
std::uint64_t synth_fingerprint(const SynthConfig& config);

/// Draw the dataset: timestamps uniform over [start, end] (sorted), features
/// iid standard normal. Bit-identical for a given config.
TemporalDataset generate(const SynthConfig& config);

/// The noise-free signal — the best possible prediction for this generator.
double oracle_predict(const SynthConfig& config, std::int64_t t,
                      const std::vector<double>& x);

/// RMSE of the oracle over the given rows of the generated (unmodified)
/// dataset; approaches noise_std. Regression only; throws if the dataset's
/// fingerprint does not match the config.
double oracle_rmse(const SynthConfig& config, const TemporalDataset& ds,
                   const std::vector<std::size_t>& rows);

std::string synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const std::string& text);

} // namespace tempshift
