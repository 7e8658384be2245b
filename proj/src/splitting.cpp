#include "tempshift/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "tempshift/rng.hpp"

namespace tempshift {

std::string split_name_str(SplitName name) {
    switch (name) {
        case SplitName::Original: return "original";
        case SplitName::A: return "a";
        case SplitName::B: return "b";
        case SplitName::C: return "c";
        case SplitName::D: return "d";
        case SplitName::Ours: return "ours";
        case SplitName::Random: return "random";
    }
    throw std::logic_error("unreachable split name");
}

SplitName split_name_from_str(const std::string& s) {
    if (s == "original") return SplitName::Original;
    if (s == "a") return SplitName::A;
    if (s == "b") return SplitName::B;
    if (s == "c") return SplitName::C;
    if (s == "d") return SplitName::D;
    if (s == "ours") return SplitName::Ours;
    if (s == "random") return SplitName::Random;
    throw std::invalid_argument("unknown split name: '" + s + "'");
}

std::pair<RowRange, RowRange> make_test_holdout(const TemporalDataset& ds,
                                                double test_fraction) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test_fraction must be in (0, 1)");
    if (!ds.is_sorted_by_time())
        throw std::invalid_argument("make_test_holdout: dataset must be sorted by time");
    const std::size_t n = ds.n_rows();
    const auto test_n =
        static_cast<std::size_t>(std::ceil(static_cast<double>(n) * test_fraction));
    if (test_n == 0 || test_n >= n)
        throw std::invalid_argument("test_fraction " + std::to_string(test_fraction) +
                                    " leaves an empty train/val or test block for n=" +
                                    std::to_string(n));
    return {RowRange{0, n - test_n}, RowRange{n - test_n, n}};
}

SegmentLayout tertile_segments(RowRange trainval) {
    const std::size_t n = trainval.size();
    if (n < 3)
        throw std::invalid_argument("tertile_segments: need at least 3 rows, got " +
                                    std::to_string(n));
    // Equal counts +-1, larger segments first: 7 -> (3,2,2), 8 -> (3,3,2).
    const std::size_t base = n / 3;
    const std::size_t extra = n % 3;
    const std::size_t n1 = base + (extra > 0 ? 1 : 0);
    const std::size_t n2 = base + (extra > 1 ? 1 : 0);
    SegmentLayout seg;
    seg.s1 = {trainval.begin, trainval.begin + n1};
    seg.s2 = {seg.s1.end, seg.s1.end + n2};
    seg.s3 = {seg.s2.end, trainval.end};
    return seg;
}

namespace {

std::vector<std::size_t> range_indices(RowRange r) {
    std::vector<std::size_t> out(r.size());
    std::iota(out.begin(), out.end(), r.begin);
    return out;
}

std::vector<std::size_t> concat_ranges(RowRange a, RowRange b) {
    auto out = range_indices(a);
    const auto tail = range_indices(b);
    out.insert(out.end(), tail.begin(), tail.end());
    return out;
}

/// Last `count` rows of a range (the side adjacent to the segment after it).
std::vector<std::size_t> tail_of(RowRange r, std::size_t count) {
    return range_indices(RowRange{r.end - count, r.end});
}

/// First `count` rows of a range.
std::vector<std::size_t> head_of(RowRange r, std::size_t count) {
    return range_indices(RowRange{r.begin, r.begin + count});
}

} // namespace

SplitPlan preset_split(SplitName name, const TemporalDataset& ds,
                       double test_fraction, std::uint64_t seed) {
    const auto [trainval, test] = make_test_holdout(ds, test_fraction);
    const SegmentLayout seg = tertile_segments(trainval);
    const std::size_t val_n = seg.s3.size(); // equal |val| across presets

    SplitPlan plan;
    plan.name = name;
    plan.segment_bounds = seg;
    plan.n_total = ds.n_rows();
    plan.test_idx = range_indices(test);
    plan.t_train_boundary = ds.timestamps[trainval.end - 1];

    switch (name) {
        case SplitName::Original:
            plan.train_idx = concat_ranges(seg.s1, seg.s2);
            plan.val_idx = range_indices(seg.s3);
            break;
        case SplitName::A:
            plan.train_idx = range_indices(seg.s1);
            plan.val_idx = range_indices(seg.s3);
            break;
        case SplitName::B:
            plan.train_idx = range_indices(seg.s2);
            plan.val_idx = range_indices(seg.s3);
            break;
        case SplitName::C:
            plan.train_idx = range_indices(seg.s1);
            // val faces its train block on the early side; trim the far end.
            plan.val_idx = head_of(seg.s2, val_n);
            break;
        case SplitName::D:
            plan.train_idx = range_indices(seg.s2);
            // val sits just before train; trim the far (earliest) end so the
            // train->val gap mirrors split b's train->val gap.
            plan.val_idx = tail_of(seg.s1, val_n);
            break;
        case SplitName::Ours:
            plan.train_idx = concat_ranges(seg.s2, seg.s3);
            plan.val_idx = tail_of(seg.s1, val_n); // same val rows as split d
            break;
        case SplitName::Random: {
            auto pool = range_indices(trainval);
            Rng rng(Rng::derive(seed, "split-random"));
            rng.shuffle(pool);
            plan.val_idx.assign(pool.begin(), pool.begin() + val_n);
            plan.train_idx.assign(pool.begin() + val_n, pool.end());
            std::sort(plan.val_idx.begin(), plan.val_idx.end());
            std::sort(plan.train_idx.begin(), plan.train_idx.end());
            break;
        }
    }
    return plan;
}

namespace {

const SplitPlan* find_plan(const std::vector<SplitPlan>& plans, SplitName name) {
    for (const auto& p : plans)
        if (p.name == name) return &p;
    return nullptr;
}

bool same_indices(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    return a == b;
}

bool disjoint(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::vector<std::size_t> inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                          std::back_inserter(inter));
    return inter.empty();
}

} // namespace

std::vector<std::string> verify_plan_relations(const std::vector<SplitPlan>& plans) {
    if (plans.empty()) throw std::invalid_argument("verify_plan_relations: no plans");
    for (const auto& p : plans) {
        if (p.n_total != plans.front().n_total)
            throw std::invalid_argument(
                "verify_plan_relations: plans built from different datasets");
        if (!same_indices(p.test_idx, plans.front().test_idx))
            throw std::invalid_argument(
                "verify_plan_relations: plans built from different test fractions");
    }

    std::vector<std::string> violations;
    auto flag = [&](const std::string& msg) { violations.push_back(msg); };

    const std::size_t val_n = plans.front().val_idx.size();
    for (const auto& p : plans) {
        const std::string nm = split_name_str(p.name);
        if (!disjoint(p.train_idx, p.val_idx))
            flag("train/val overlap in preset " + nm);
        if (!disjoint(p.train_idx, p.test_idx) || !disjoint(p.val_idx, p.test_idx))
            flag("test overlaps train or val in preset " + nm);
        if (p.val_idx.size() != val_n)
            flag("|val| differs in preset " + nm + " (" +
                 std::to_string(p.val_idx.size()) + " vs " + std::to_string(val_n) + ")");
    }

    const auto* a = find_plan(plans, SplitName::A);
    const auto* b = find_plan(plans, SplitName::B);
    const auto* c = find_plan(plans, SplitName::C);
    const auto* d = find_plan(plans, SplitName::D);
    const auto* ours = find_plan(plans, SplitName::Ours);

    if (a && b && !same_indices(a->val_idx, b->val_idx))
        flag("val(a) != val(b)");
    if (a && c && !same_indices(a->train_idx, c->train_idx))
        flag("train(a) != train(c)");
    if (b && d && !same_indices(b->train_idx, d->train_idx))
        flag("train(b) != train(d)");
    if (d && ours && !same_indices(d->val_idx, ours->val_idx))
        flag("val(d) != val(ours)");
    if (d) {
        const auto s1 = d->segment_bounds.s1;
        for (std::size_t i : d->val_idx)
            if (i < s1.begin || i >= s1.end) {
                flag("val(d) not contained in first segment");
                break;
            }
    }
    return violations;
}

std::string split_plan_to_json(const SplitPlan& plan, const TemporalDataset& ds,
                               bool include_indices) {
    nlohmann::json j;
    j["name"] = split_name_str(plan.name);
    j["n_total"] = plan.n_total;
    j["n_train"] = plan.train_idx.size();
    j["n_val"] = plan.val_idx.size();
    j["n_test"] = plan.test_idx.size();
    j["t_train_boundary"] = plan.t_train_boundary;
    auto range_json = [](RowRange r) {
        return nlohmann::json{{"begin", r.begin}, {"end", r.end}};
    };
    j["segments"] = {{"s1", range_json(plan.segment_bounds.s1)},
                     {"s2", range_json(plan.segment_bounds.s2)},
                     {"s3", range_json(plan.segment_bounds.s3)}};
    auto block_times = [&](const std::vector<std::size_t>& idx) {
        nlohmann::json b;
        if (!idx.empty()) {
            b["first_timestamp"] = ds.timestamps[idx.front()];
            b["last_timestamp"] = ds.timestamps[idx.back()];
        }
        return b;
    };
    j["train"] = block_times(plan.train_idx);
    j["val"] = block_times(plan.val_idx);
    j["test"] = block_times(plan.test_idx);
    if (include_indices) {
        j["train_idx"] = plan.train_idx;
        j["val_idx"] = plan.val_idx;
        j["test_idx"] = plan.test_idx;
    }
    return j.dump(2);
}

} // namespace tempshift
