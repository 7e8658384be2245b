#include "tempshift/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tempshift {

double auc(const std::vector<double>& scores, const std::vector<double>& labels) {
    const std::size_t n = scores.size();
    if (labels.size() != n)
        throw std::invalid_argument("auc: scores/labels length mismatch");
    std::size_t n_pos = 0;
    for (double y : labels) {
        if (y != 0.0 && y != 1.0)
            throw std::invalid_argument("auc: labels must be 0 or 1");
        if (y == 1.0) ++n_pos;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("auc: undefined with a single class");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks over tie groups; AUC = (R_pos - n_pos(n_pos+1)/2) / (n_pos n_neg).
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j); // ranks are 1-based
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1.0) rank_sum_pos += midrank;
        i = j;
    }
    const double u = rank_sum_pos -
                     0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double rmse(const std::vector<double>& preds, const std::vector<double>& targets) {
    if (preds.empty()) throw std::invalid_argument("rmse: empty input");
    if (preds.size() != targets.size())
        throw std::invalid_argument("rmse: length mismatch");
    double s = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double d = preds[i] - targets[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(preds.size()));
}

double pct_improvement(double base, double next, Task task) {
    if (!(base > 0)) throw std::invalid_argument("pct_improvement: base must be > 0");
    const double delta = task == Task::Classification ? next - base : base - next;
    return delta / base * 100.0;
}

double mean_improvement(const std::vector<double>& base,
                        const std::vector<double>& next, Task task) {
    if (base.empty() || base.size() != next.size())
        throw std::invalid_argument("mean_improvement: need equal non-empty lists");
    double s = 0;
    for (std::size_t i = 0; i < base.size(); ++i)
        s += pct_improvement(base[i], next[i], task);
    return s / static_cast<double>(base.size());
}

double robust_average(const std::vector<double>& values) {
    if (values.size() < 3)
        throw std::invalid_argument("robust_average: need at least 3 values");
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    // Drop exactly one minimum and one maximum occurrence.
    double s = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
    return s / static_cast<double>(v.size() - 2);
}

double robustness_score(double mu, double sigma, double k) { return mu - k * sigma; }

std::pair<double, double> mean_std(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("mean_std: empty input");
    double m = 0;
    for (double v : values) m += v;
    m /= static_cast<double>(values.size());
    double var = 0;
    for (double v : values) var += (v - m) * (v - m);
    var /= static_cast<double>(values.size());
    return {m, std::sqrt(var)};
}

namespace {

/// Symmetric (half-sample) reflective index: ..., x[1], x[0] | x[0], x[1], ...
/// Folding this way keeps a normalized symmetric kernel mean-preserving.
std::size_t reflect_index(long long i, std::size_t n) {
    const long long period = 2 * static_cast<long long>(n);
    long long j = ((i % period) + period) % period;
    if (j >= static_cast<long long>(n)) j = period - 1 - j;
    return static_cast<std::size_t>(j);
}

} // namespace

std::vector<double> loss_over_time(const std::vector<double>& per_instance_losses,
                                   const TimeSliceIndex& slices,
                                   double smoothing_sigma) {
    const std::size_t s = slices.n_slices();
    if (smoothing_sigma < 0)
        throw std::invalid_argument("loss_over_time: sigma must be >= 0");

    std::vector<double> curve(s, 0.0);
    std::vector<bool> filled(s, false);
    bool any = false;
    for (std::size_t i = 0; i < s; ++i) {
        const auto [begin, end] = slices.ranges[i];
        if (begin == end) continue;
        if (end > per_instance_losses.size())
            throw std::invalid_argument("loss_over_time: losses not aligned to slices");
        double m = 0;
        for (std::size_t r = begin; r < end; ++r) m += per_instance_losses[r];
        curve[i] = m / static_cast<double>(end - begin);
        filled[i] = true;
        any = true;
    }
    if (!any) throw std::invalid_argument("loss_over_time: every slice is empty");

    // Interpolate empty slices linearly between nearest non-empty neighbors;
    // clamp at the ends.
    std::size_t prev = s; // last filled index seen
    for (std::size_t i = 0; i < s; ++i) {
        if (filled[i]) {
            prev = i;
            continue;
        }
        std::size_t next = i + 1;
        while (next < s && !filled[next]) ++next;
        if (prev == s) {
            curve[i] = curve[next];
        } else if (next == s) {
            curve[i] = curve[prev];
        } else {
            const double w = static_cast<double>(i - prev) /
                             static_cast<double>(next - prev);
            curve[i] = curve[prev] * (1.0 - w) + curve[next] * w;
        }
    }

    if (smoothing_sigma == 0) return curve;

    const auto radius =
        static_cast<long long>(std::ceil(4.0 * smoothing_sigma));
    std::vector<double> kernel(2 * radius + 1);
    double norm = 0;
    for (long long d = -radius; d <= radius; ++d) {
        const double w = std::exp(-0.5 * static_cast<double>(d * d) /
                                  (smoothing_sigma * smoothing_sigma));
        kernel[static_cast<std::size_t>(d + radius)] = w;
        norm += w;
    }
    for (double& w : kernel) w /= norm;

    std::vector<double> out(s, 0.0);
    for (std::size_t i = 0; i < s; ++i) {
        double v = 0;
        for (long long d = -radius; d <= radius; ++d)
            v += kernel[static_cast<std::size_t>(d + radius)] *
                 curve[reflect_index(static_cast<long long>(i) + d, s)];
        out[i] = v;
    }
    return out;
}

} // namespace tempshift
