#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tempshift/dataset.hpp"
#include "tempshift/matrix.hpp"

namespace tempshift {

enum class HeatmapSource { RawFeatures, Representation };

std::string heatmap_source_str(HeatmapSource s);
HeatmapSource heatmap_source_from_str(const std::string& s);

/// Biased linear-kernel MMD^2 between two row sets. With k(u,v) = u.v the
/// double-sum estimator collapses to ||mean(X) - mean(Y)||^2, which is what
/// this computes. Throws std::invalid_argument on an empty set or a column
/// width mismatch.
double linear_mmd2(const Matrix& X, const Matrix& Y);

/// Pairwise MMD^2 between time slices. Entries touching an empty slice are
/// NaN ("missing"); everything else is symmetric with an exactly zero
/// diagonal.
struct DriftHeatmap {
    HeatmapSource source = HeatmapSource::RawFeatures;
    std::vector<std::int64_t> slice_starts;
    std::vector<bool> missing; // per-slice: no rows fell in it
    Matrix M;                  // s x s

    std::size_t n_slices() const { return missing.size(); }
};

/// Build the heatmap for `data` whose rows are grouped by `slices` (the rows
/// of slice s are data rows [ranges[s].first, ranges[s].second)). The caller
/// prepares `data`: standardized features for the raw view, eval-mode
/// penultimate activations for the representation view. Throws when fewer
/// than two slices are non-empty or the row counts disagree.
DriftHeatmap heatmap(const Matrix& data, const TimeSliceIndex& slices,
                     HeatmapSource source);

/// profile[l] = mean of the non-missing entries M[i][i+l], for l = 0..max_lag.
/// A lag whose entries are all missing yields NaN. Requires max_lag < s.
std::vector<double> band_profile(const DriftHeatmap& H, std::size_t max_lag);

/// Lags l > 0 where profile[l] is a strict local minimum and sits at least
/// rel_depth below the profile median. Profiles shorter than 3 yield no
/// periods; NaN entries never qualify.
std::vector<std::size_t> detect_periods(const std::vector<double>& profile,
                                        double rel_depth = 0.1);

/// CSV matrix with slice start timestamps as the header row and first
/// column; missing entries spelled "nan". Values use %.17g.
std::string heatmap_to_csv(const DriftHeatmap& H);

/// Binary 8-bit PGM, min-max normalized over the non-missing entries;
/// missing entries render at max intensity (255).
std::string heatmap_to_pgm(const DriftHeatmap& H);

} // namespace tempshift
