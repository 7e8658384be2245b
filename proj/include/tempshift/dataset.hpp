#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tempshift/matrix.hpp"

namespace tempshift {

enum class Task { Classification, Regression };

std::string task_name(Task t);
Task task_from_name(const std::string& name);

/// Timestamped feature matrix with labels. The universal input: rows must be
/// sorted by timestamp (sort_by_time) before any split or slice operation.
struct TemporalDataset {
    Matrix features;                      // n x d
    std::vector<std::int64_t> timestamps; // n, Unix epoch seconds UTC
    std::vector<double> labels;           // n
    Task task = Task::Regression;
    std::vector<std::string> feature_names; // d
    std::uint64_t provenance = 0; // generator fingerprint; 0 = not synthetic

    std::size_t n_rows() const { return timestamps.size(); }
    std::size_t n_features() const { return features.cols; }
    bool is_sorted_by_time() const;
};

/// Column roles for CSV ingestion.
struct CsvSchema {
    std::string timestamp_column;
    std::string label_column;
    // Empty means: every other column is a feature, in header order.
    std::vector<std::string> feature_columns;
    Task task = Task::Regression;
    // Skip rows with unparseable cells instead of erroring.
    bool drop_bad_rows = false;
    // Keep empty feature cells as NaN for later mean imputation instead of
    // treating them as bad cells. Rows with missing timestamp/label are
    // always bad.
    bool allow_missing = false;
};

struct LoadReport {
    std::size_t rows_kept = 0;
    std::size_t rows_dropped = 0;
    std::size_t missing_cells = 0;
};

/// Parse a CSV file (comma separated, header row, '.' decimal point).
/// Timestamps may be integer epoch seconds or ISO-8601 date-times.
/// Throws std::runtime_error with row/column location on bad cells unless
/// schema.drop_bad_rows is set.
TemporalDataset load_csv(const std::string& path, const CsvSchema& schema,
                         LoadReport* report = nullptr);

/// Stable sort of rows by timestamp (ties keep original order). Idempotent.
TemporalDataset sort_by_time(const TemporalDataset& ds);

/// Replace NaN feature cells with per-column means computed over `rows`
/// (NaNs in those rows are excluded from the mean; a column that is entirely
/// NaN over `rows` is imputed with 0). Modifies every row of the dataset.
void impute_with_mean(TemporalDataset& ds, const std::vector<std::size_t>& rows);

/// Throws std::runtime_error naming the first offending row if any feature,
/// label, or classification-label-domain violation remains.
void validate_finite(const TemporalDataset& ds);

/// Per-feature z-score parameters, population (1/n) variance, std floored at
/// 1e-12. Label stats are fitted only for regression datasets.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> stds;
    bool has_label_stats = false;
    double label_mean = 0.0;
    double label_std = 1.0;

    /// Standardize features (and labels when fitted) in place over all rows.
    void apply(TemporalDataset& ds) const;
    /// Invert the feature (and label) transform in place.
    void invert(TemporalDataset& ds) const;
    /// De-standardize a single prediction back to label units.
    double destandardize_label(double y) const {
        return has_label_stats ? y * label_std + label_mean : y;
    }
    double standardize_label(double y) const {
        return has_label_stats ? (y - label_mean) / label_std : y;
    }
};

/// Fit means/stds over `rows` only. Throws std::invalid_argument if `rows`
/// is empty or contains an out-of-range index.
Standardizer fit_standardizer(const TemporalDataset& ds,
                              const std::vector<std::size_t>& rows);

/// Contiguous half-open row ranges per fixed-width time slice.
struct TimeSliceIndex {
    std::int64_t slice_width = 0;
    std::vector<std::int64_t> boundaries;                        // slice start times
    std::vector<std::pair<std::size_t, std::size_t>> ranges;     // [begin, end) rows

    std::size_t n_slices() const { return ranges.size(); }
    bool empty_slice(std::size_t s) const {
        return ranges[s].first == ranges[s].second;
    }
};

/// Partition a sorted dataset into consecutive slices of `slice_width`
/// seconds, aligned to multiples of slice_width from the floor of the first
/// timestamp. Empty interior slices are retained so slice index differences
/// stay proportional to time differences.
TimeSliceIndex slice_by_time(const TemporalDataset& ds, std::int64_t slice_width);

} // namespace tempshift
