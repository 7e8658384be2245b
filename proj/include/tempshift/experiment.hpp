#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tempshift/dataset.hpp"
#include "tempshift/embedding.hpp"
#include "tempshift/metrics.hpp"
#include "tempshift/model.hpp"
#include "tempshift/optim.hpp"
#include "tempshift/splitting.hpp"
#include "tempshift/synth.hpp"

namespace tempshift {

/// Flat `key = value` text, one pair per line; '#' starts a comment; blank
/// lines ignored; a repeated key keeps the last value. Throws on a line
/// without '=' or an empty key.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::string& path);

/// Apply one "key=value" override (the --set flag).
void apply_override(std::map<std::string, std::string>& kv,
                    const std::string& assignment);

/// Everything one experiment needs. Defaults give a small synthetic run.
struct ExperimentConfig {
    // dataset
    std::string source = "synth"; // "synth" | "csv"
    std::string dataset_name = "synth";
    std::string csv_path;
    CsvSchema schema;
    SynthConfig synth;

    // protocol
    double test_fraction = 0.2;
    std::vector<SplitName> presets = {SplitName::Original, SplitName::Ours};
    SplitName baseline = SplitName::Original;
    std::uint64_t split_seed = 0; // random preset only

    // model + encoder
    ModelKind model_kind = ModelKind::Mlp;
    std::vector<std::size_t> hidden = {64, 64};
    double dropout = 0.0;
    TemporalEncoderConfig encoder;

    // training
    TrainConfig train; // its seed field is replaced by each run's seed
    std::vector<std::uint64_t> seeds = {0};

    // outputs
    std::string out_dir = "out";
    bool heatmaps = true;
    bool loss_curves = true;
    bool write_pgm = false;
    std::int64_t slice_width = 86400;
    double smoothing_sigma = 2.0;
    std::size_t jobs = 1;
};

/// Typed view of the dotted-key map; rejects unknown keys and bad values.
ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv);

/// Method label used in score rows, e.g. "mlp" or "mlp+fourier".
std::string method_label(const ExperimentConfig& cfg);

/// Load the configured dataset (synthetic or CSV), sorted by time.
TemporalDataset load_experiment_dataset(const ExperimentConfig& cfg);

struct RunError {
    std::string preset;
    std::uint64_t seed = 0;
    std::string what;
};

struct ExperimentResult {
    std::vector<ScoreRow> scores;
    std::vector<RunError> errors;
    int exit_code = 0;
};

/// Run every (preset x seed) cell, then write scores.csv, summary.json,
/// splitplan_<preset>.json, per-preset diagnostics, and errors.json (only on
/// failure) under cfg.out_dir. Writes are atomic; re-running a config
/// byte-reproduces every artifact. exit_code is 0 iff all cells completed.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string scores_to_csv(const std::vector<ScoreRow>& rows);
std::vector<ScoreRow> scores_from_csv(const std::string& text);

/// Per-(method, dataset) comparison of a baseline report against a new one.
struct CompareRow {
    std::string method;
    std::string dataset;
    Task task = Task::Regression;
    double base_mean = 0.0, base_std = 0.0;
    double next_mean = 0.0, next_std = 0.0;
    double improvement = 0.0; // pct, positive = next better
    double base_rs[3] = {0, 0, 0};
    double next_rs[3] = {0, 0, 0};
    int base_rank = 1, next_rank = 1; // 1 = better mean (ties share rank 1)
};

struct CompareSummary {
    std::vector<CompareRow> rows;
    /// method -> plain mean of per-dataset improvements.
    std::map<std::string, double> mean_improvement_by_method;
};

/// Both reports must cover the same (method, dataset, task) groups.
CompareSummary compare_reports(const std::vector<ScoreRow>& base,
                               const std::vector<ScoreRow>& next);
std::string compare_to_text(const CompareSummary& summary);

/// The standard CSV layout: timestamp, features..., label.
std::string dataset_to_csv(const TemporalDataset& ds);

/// Write-temp-then-rename; creates parent directories.
void atomic_write_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace tempshift
