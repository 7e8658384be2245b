#include "tempshift/drift.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "tempshift/kernels.hpp"

namespace tempshift {

std::string heatmap_source_str(HeatmapSource s) {
    return s == HeatmapSource::RawFeatures ? "raw_features" : "representation";
}

HeatmapSource heatmap_source_from_str(const std::string& s) {
    if (s == "raw_features") return HeatmapSource::RawFeatures;
    if (s == "representation") return HeatmapSource::Representation;
    throw std::invalid_argument("unknown heatmap source: " + s);
}

namespace {

std::vector<double> row_block_mean(const Matrix& data, std::size_t begin,
                                   std::size_t end) {
    std::vector<double> mu(data.cols, 0.0);
    for (std::size_t i = begin; i < end; ++i)
        for (std::size_t j = 0; j < data.cols; ++j) mu[j] += data(i, j);
    const double inv = 1.0 / static_cast<double>(end - begin);
    for (double& v : mu) v *= inv;
    return mu;
}

} // namespace

double linear_mmd2(const Matrix& X, const Matrix& Y) {
    if (X.rows == 0 || Y.rows == 0)
        throw std::invalid_argument("linear_mmd2: empty set");
    if (X.cols != Y.cols)
        throw std::invalid_argument("linear_mmd2: column width mismatch");
    const std::vector<double> mx = row_block_mean(X, 0, X.rows);
    const std::vector<double> my = row_block_mean(Y, 0, Y.rows);
    double acc = 0.0;
    for (std::size_t j = 0; j < X.cols; ++j) {
        const double d = mx[j] - my[j];
        acc += d * d;
    }
    return acc;
}

DriftHeatmap heatmap(const Matrix& data, const TimeSliceIndex& slices,
                     HeatmapSource source) {
    const std::size_t s = slices.n_slices();
    if (s > 0 && slices.ranges.back().second != data.rows)
        throw std::invalid_argument("heatmap: data rows do not match the slice index");

    DriftHeatmap H;
    H.source = source;
    H.slice_starts = slices.boundaries;
    H.missing.resize(s);
    std::vector<std::size_t> live; // non-empty slice ids
    for (std::size_t i = 0; i < s; ++i) {
        H.missing[i] = slices.empty_slice(i);
        if (!H.missing[i]) live.push_back(i);
    }
    if (live.size() < 2)
        throw std::invalid_argument("heatmap: need at least 2 non-empty slices");

    // One mean vector per live slice; the pairwise squared distances between
    // them are exactly the linear-kernel MMD^2 values.
    Matrix means(live.size(), data.cols);
    for (std::size_t k = 0; k < live.size(); ++k) {
        const auto [begin, end] = slices.ranges[live[k]];
        const std::vector<double> mu = row_block_mean(data, begin, end);
        std::copy(mu.begin(), mu.end(), means.row_ptr(k));
    }
    Matrix dist;
    kernels::pairwise_sqdist(means, dist);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    H.M = Matrix(s, s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) H.M(i, j) = nan;
    for (std::size_t a = 0; a < live.size(); ++a)
        for (std::size_t b = 0; b < live.size(); ++b)
            H.M(live[a], live[b]) = dist(a, b);
    return H;
}

std::vector<double> band_profile(const DriftHeatmap& H, std::size_t max_lag) {
    const std::size_t s = H.n_slices();
    if (max_lag >= s)
        throw std::invalid_argument("band_profile: max_lag must be < slice count");
    std::vector<double> profile(max_lag + 1,
                                std::numeric_limits<double>::quiet_NaN());
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i + lag < s; ++i) {
            const double v = H.M(i, i + lag);
            if (std::isnan(v)) continue;
            acc += v;
            ++count;
        }
        if (count > 0) profile[lag] = acc / static_cast<double>(count);
    }
    return profile;
}

std::vector<std::size_t> detect_periods(const std::vector<double>& profile,
                                        double rel_depth) {
    std::vector<std::size_t> lags;
    if (profile.size() < 3) return lags;

    std::vector<double> finite;
    for (double v : profile)
        if (!std::isnan(v)) finite.push_back(v);
    if (finite.empty()) return lags;
    std::sort(finite.begin(), finite.end());
    const std::size_t n = finite.size();
    const double median =
        n % 2 == 1 ? finite[n / 2] : 0.5 * (finite[n / 2 - 1] + finite[n / 2]);
    const double ceiling = median * (1.0 - rel_depth);

    for (std::size_t l = 1; l + 1 < profile.size(); ++l) {
        const double v = profile[l];
        if (std::isnan(v) || std::isnan(profile[l - 1]) || std::isnan(profile[l + 1]))
            continue;
        if (v < profile[l - 1] && v < profile[l + 1] && v < ceiling)
            lags.push_back(l);
    }
    return lags;
}

namespace {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string heatmap_to_csv(const DriftHeatmap& H) {
    const std::size_t s = H.n_slices();
    std::string out = "slice_start";
    for (std::size_t j = 0; j < s; ++j)
        out += "," + std::to_string(H.slice_starts[j]);
    out += "\n";
    for (std::size_t i = 0; i < s; ++i) {
        out += std::to_string(H.slice_starts[i]);
        for (std::size_t j = 0; j < s; ++j) out += "," + format_double(H.M(i, j));
        out += "\n";
    }
    return out;
}

std::string heatmap_to_pgm(const DriftHeatmap& H) {
    const std::size_t s = H.n_slices();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) {
            const double v = H.M(i, j);
            if (std::isnan(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    const double span = hi - lo;

    std::string out = "P5\n" + std::to_string(s) + " " + std::to_string(s) + "\n255\n";
    out.reserve(out.size() + s * s);
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) {
            const double v = H.M(i, j);
            unsigned char byte = 255;
            if (!std::isnan(v))
                byte = span > 0.0 ? static_cast<unsigned char>(
                                        std::lround((v - lo) / span * 255.0))
                                  : 0;
            out.push_back(static_cast<char>(byte));
        }
    return out;
}

} // namespace tempshift
