#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tempshift/dataset.hpp"

namespace tempshift {

/// Half-open contiguous row range.
struct RowRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

/// Three contiguous equal-count (+-1, larger first) segments covering the
/// pre-test rows in temporal order.
struct SegmentLayout {
    RowRange s1, s2, s3;
};

enum class SplitName { Original, A, B, C, D, Ours, Random };

std::string split_name_str(SplitName name);
SplitName split_name_from_str(const std::string& s);

/// Disjoint sorted train/val/test index sets over one sorted dataset.
struct SplitPlan {
    SplitName name = SplitName::Original;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> val_idx;
    std::vector<std::size_t> test_idx;
    std::int64_t t_train_boundary = 0; // timestamp of last pre-test row
    SegmentLayout segment_bounds;
    std::size_t n_total = 0;
};

/// Split off the final ceil(n * test_fraction) rows as the test block.
/// Returns (trainval range, test range). Throws std::invalid_argument when
/// either side would be empty or the dataset is unsorted.
std::pair<RowRange, RowRange> make_test_holdout(const TemporalDataset& ds,
                                                double test_fraction);

/// Divide a contiguous range into three equal-count (+-1) segments, larger
/// segments first. Throws std::invalid_argument for fewer than 3 rows.
SegmentLayout tertile_segments(RowRange trainval);

/// Build one of the split geometries over a sorted dataset:
///   original: train=S1+S2, val=S3
///   a: train=S1, val=S3        b: train=S2, val=S3
///   c: train=S1, val=S2        d: train=S2, val=S1
///   ours: train=S2+S3, val=S1
///   random: val = seeded uniform sample of |S3| trainval rows, train = rest
/// All presets use |val| = |S3| exactly; when a val segment is one row larger
/// than S3 it is trimmed on the side facing away from its train block.
/// Deterministic given (ds, name, test_fraction, seed).
SplitPlan preset_split(SplitName name, const TemporalDataset& ds,
                       double test_fraction, std::uint64_t seed = 0);

/// Cross-preset consistency report. Throws std::invalid_argument when the
/// plans disagree on dataset size or test block (precondition violation);
/// otherwise lists every violated relation (empty = all hold).
std::vector<std::string> verify_plan_relations(const std::vector<SplitPlan>& plans);

/// JSON report: name, counts, boundary timestamps, segment layout, and
/// (optionally) full index lists.
std::string split_plan_to_json(const SplitPlan& plan, const TemporalDataset& ds,
                               bool include_indices = false);

} // namespace tempshift
