#include "tempshift/embedding.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>

#include "tempshift/civil_time.hpp"
#include "tempshift/kernels.hpp"
#include "tempshift/rng.hpp"

namespace tempshift {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

std::int64_t period_from_name(const std::string& name) {
    if (name == "hour") return periods::hour;
    if (name == "day") return periods::day;
    if (name == "week") return periods::week;
    if (name == "month") return periods::month;
    if (name == "year") return periods::year;
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(name.c_str(), &end, 10);
    if (!name.empty() && end == name.c_str() + name.size() && errno != ERANGE && v > 0)
        return v;
    throw std::invalid_argument("unknown period: '" + name +
                                "' (expected hour/day/week/month/year or seconds)");
}

std::vector<FourierComponent> FourierSpec::active() const {
    std::vector<FourierComponent> out;
    for (const auto& c : components) {
        if (c.order < 0) throw std::invalid_argument("Fourier order must be >= 0");
        if (c.order == 0) continue;
        if (c.period <= 0) throw std::invalid_argument("Fourier period must be positive");
        out.push_back(c);
    }
    return out;
}

std::size_t FourierSpec::periodic_width() const {
    std::size_t w = 0;
    for (const auto& c : active()) w += 2 * static_cast<std::size_t>(c.order);
    return w;
}

std::string encoder_mode_str(EncoderMode m) {
    switch (m) {
        case EncoderMode::None: return "none";
        case EncoderMode::Num: return "num";
        case EncoderMode::Timeparts: return "timeparts";
        case EncoderMode::Fourier: return "fourier";
    }
    throw std::logic_error("unreachable encoder mode");
}

EncoderMode encoder_mode_from_str(const std::string& s) {
    if (s == "none") return EncoderMode::None;
    if (s == "num") return EncoderMode::Num;
    if (s == "timeparts") return EncoderMode::Timeparts;
    if (s == "fourier") return EncoderMode::Fourier;
    throw std::invalid_argument("unknown encoder mode: '" + s + "'");
}

std::string attachment_str(Attachment a) {
    return a == Attachment::AsFeatures ? "as_features" : "to_backbone";
}

Attachment attachment_from_str(const std::string& s) {
    if (s == "as_features") return Attachment::AsFeatures;
    if (s == "to_backbone") return Attachment::ToBackbone;
    throw std::invalid_argument("unknown attachment mode: '" + s + "'");
}

std::size_t TemporalEncoderConfig::output_width() const {
    switch (mode) {
        case EncoderMode::None: return 0;
        case EncoderMode::Num: return 1;
        case EncoderMode::Timeparts: return 6;
        case EncoderMode::Fourier: {
            const std::size_t core = d_embedding > 0
                                         ? static_cast<std::size_t>(d_embedding)
                                         : spec.periodic_width();
            return core + (trend ? 1 : 0);
        }
    }
    throw std::logic_error("unreachable encoder mode");
}

std::vector<double> fourier_features(std::int64_t t, std::int64_t period, int order) {
    if (period <= 0) throw std::invalid_argument("fourier_features: period must be > 0");
    if (order < 1) throw std::invalid_argument("fourier_features: order must be >= 1");
    // Exact phase reduction: r/period is the position within the cycle, so
    // t and t + period map to identical features bit for bit.
    const std::int64_t r = ((t % period) + period) % period;
    const double frac = static_cast<double>(r) / static_cast<double>(period);
    std::vector<double> out;
    out.reserve(2 * static_cast<std::size_t>(order));
    for (int k = 1; k <= order; ++k) {
        const double phase = two_pi * static_cast<double>(k) * frac;
        out.push_back(std::sin(phase));
        out.push_back(std::cos(phase));
    }
    return out;
}

std::vector<double> periodic_concat(std::int64_t t, const FourierSpec& spec) {
    const auto comps = spec.active();
    if (comps.empty())
        throw std::invalid_argument("periodic_concat: no active Fourier components");
    std::vector<double> out;
    out.reserve(spec.periodic_width());
    for (const auto& c : comps) {
        const auto f = fourier_features(t, c.period, c.order);
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

std::vector<double> timeparts(std::int64_t t) {
    const CivilDateTime c = civil_from_epoch(t);
    return {static_cast<double>(c.year),   static_cast<double>(c.month),
            static_cast<double>(c.day),    static_cast<double>(c.hour),
            static_cast<double>(c.minute), static_cast<double>(c.second)};
}

double trend(std::int64_t t, const TrendStats& stats) {
    if (!(stats.std > 0)) throw std::invalid_argument("trend: std must be positive");
    return (static_cast<double>(t) - stats.mean) / stats.std;
}

EncoderParams init_encoder(const TemporalEncoderConfig& config,
                           const std::vector<std::int64_t>& train_timestamps,
                           std::uint64_t seed) {
    if (train_timestamps.empty())
        throw std::invalid_argument("init_encoder: no train timestamps");

    EncoderParams p;
    double mean = 0;
    for (std::int64_t t : train_timestamps) mean += static_cast<double>(t);
    mean /= static_cast<double>(train_timestamps.size());
    double var = 0;
    for (std::int64_t t : train_timestamps) {
        const double d = static_cast<double>(t) - mean;
        var += d * d;
    }
    var /= static_cast<double>(train_timestamps.size());
    p.trend_stats = {mean, std::max(std::sqrt(var), 1e-12)};

    const auto [lo, hi] =
        std::minmax_element(train_timestamps.begin(), train_timestamps.end());
    p.t_ref = static_cast<double>(*lo);
    p.t_span = std::max(static_cast<double>(*hi - *lo), 1.0);

    if (config.mode != EncoderMode::Fourier) return p;

    const auto comps = config.spec.active();
    if (comps.empty())
        throw std::invalid_argument("init_encoder: fourier mode needs >= 1 active component");

    if (config.learnable_frequencies) {
        for (const auto& c : comps)
            for (int k = 1; k <= c.order; ++k)
                p.frequencies.push_back(two_pi * static_cast<double>(k) * p.t_span /
                                        static_cast<double>(c.period));
    }

    if (config.d_embedding > 0) {
        const std::size_t fan_in = config.spec.periodic_width();
        const std::size_t fan_out = static_cast<std::size_t>(config.d_embedding);
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Rng rng(Rng::derive(seed, "encoder-init"));
        p.W = Matrix(fan_out, fan_in);
        for (double& w : p.W.data) w = rng.uniform(-bound, bound);
        p.b.resize(fan_out);
        for (double& v : p.b) v = rng.uniform(-bound, bound);
    }
    return p;
}

namespace {

/// Fill one row of the periodic feature block. Learnable mode evaluates
/// sin/cos of frequencies[j] * tau; fixed mode uses exact phase reduction.
void periodic_row(std::int64_t t, const TemporalEncoderConfig& config,
                  const EncoderParams& params, double* out, double* tau_out) {
    const auto comps = config.spec.active();
    if (config.learnable_frequencies) {
        const double tau = (static_cast<double>(t) - params.t_ref) / params.t_span;
        if (tau_out) *tau_out = tau;
        std::size_t col = 0, j = 0;
        for (const auto& c : comps)
            for (int k = 1; k <= c.order; ++k, ++j) {
                const double phase = params.frequencies[j] * tau;
                out[col++] = std::sin(phase);
                out[col++] = std::cos(phase);
            }
    } else {
        if (tau_out) *tau_out = 0.0;
        std::size_t col = 0;
        for (const auto& c : comps) {
            const auto f = fourier_features(t, c.period, c.order);
            std::copy(f.begin(), f.end(), out + col);
            col += f.size();
        }
    }
}

} // namespace

Matrix encode_batch(const std::vector<std::int64_t>& ts,
                    const TemporalEncoderConfig& config, const EncoderParams& params,
                    EncoderCache* cache) {
    const std::size_t n = ts.size();
    const std::size_t width = config.output_width();
    Matrix out(n, width);

    switch (config.mode) {
        case EncoderMode::None:
            return out;
        case EncoderMode::Num:
            for (std::size_t i = 0; i < n; ++i) out(i, 0) = trend(ts[i], params.trend_stats);
            return out;
        case EncoderMode::Timeparts:
            for (std::size_t i = 0; i < n; ++i) {
                const auto parts = timeparts(ts[i]);
                std::copy(parts.begin(), parts.end(), out.row_ptr(i));
            }
            return out;
        case EncoderMode::Fourier:
            break;
    }

    const std::size_t pw = config.spec.periodic_width();
    if (config.spec.active().empty())
        throw std::invalid_argument("encode: fourier mode needs >= 1 active component");
    if (config.learnable_frequencies &&
        params.frequencies.size() != pw / 2)
        throw std::invalid_argument("encode: frequency count does not match spec");

    Matrix periodic(n, pw);
    std::vector<double> tau(config.learnable_frequencies ? n : 0);
    for (std::size_t i = 0; i < n; ++i)
        periodic_row(ts[i], config, params, periodic.row_ptr(i),
                     config.learnable_frequencies ? &tau[i] : nullptr);

    std::size_t core = pw;
    Matrix pre;
    if (config.d_embedding > 0) {
        core = static_cast<std::size_t>(config.d_embedding);
        params.W.require_shape(core, pw, "encoder projection W");
        if (params.b.size() != core)
            throw std::invalid_argument("encoder projection b: wrong length");
        kernels::linear_forward(periodic, params.W, params.b, pre);
        for (std::size_t i = 0; i < n; ++i) {
            const double* src = pre.row_ptr(i);
            double* dst = out.row_ptr(i);
            for (std::size_t j = 0; j < core; ++j) dst[j] = src[j] > 0 ? src[j] : 0.0;
        }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            std::copy_n(periodic.row_ptr(i), pw, out.row_ptr(i));
    }

    if (config.trend)
        for (std::size_t i = 0; i < n; ++i)
            out(i, core) = trend(ts[i], params.trend_stats);

    if (cache) {
        cache->periodic = std::move(periodic);
        cache->pre_act = std::move(pre);
        cache->tau = std::move(tau);
    }
    return out;
}

std::vector<double> encode(std::int64_t t, const TemporalEncoderConfig& config,
                           const EncoderParams& params) {
    const Matrix m = encode_batch({t}, config, params);
    return {m.data.begin(), m.data.end()};
}

EncoderGrads encoder_backward(const Matrix& d_embedding,
                              const TemporalEncoderConfig& config,
                              const EncoderParams& params, const EncoderCache& cache) {
    EncoderGrads g;
    if (config.mode != EncoderMode::Fourier) return g;

    const std::size_t n = d_embedding.rows;
    const std::size_t pw = config.spec.periodic_width();
    const std::size_t core =
        config.d_embedding > 0 ? static_cast<std::size_t>(config.d_embedding) : pw;
    if (d_embedding.cols != core + (config.trend ? 1 : 0))
        throw std::invalid_argument("encoder_backward: gradient width mismatch");

    // Gradient wrt the periodic block (drop the parameter-free trend column).
    Matrix d_periodic;
    if (config.d_embedding > 0) {
        Matrix d_pre(n, core);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < core; ++j)
                d_pre(i, j) = cache.pre_act(i, j) > 0 ? d_embedding(i, j) : 0.0;
        kernels::linear_backward_params(d_pre, cache.periodic, g.dW, g.db);
        if (config.learnable_frequencies)
            kernels::linear_backward_input(d_pre, params.W, d_periodic);
    } else if (config.learnable_frequencies) {
        d_periodic = Matrix(n, pw);
        for (std::size_t i = 0; i < n; ++i)
            std::copy_n(d_embedding.row_ptr(i), pw, d_periodic.row_ptr(i));
    }

    if (config.learnable_frequencies) {
        // periodic[2j] = sin(w_j tau), periodic[2j+1] = cos(w_j tau):
        // dL/dw_j = sum_i tau_i * (dsin * cos - dcos * sin).
        g.dfrequencies.assign(pw / 2, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* dp = d_periodic.row_ptr(i);
            const double* p = cache.periodic.row_ptr(i);
            const double tau = cache.tau[i];
            for (std::size_t j = 0; j < pw / 2; ++j)
                g.dfrequencies[j] += tau * (dp[2 * j] * p[2 * j + 1] - dp[2 * j + 1] * p[2 * j]);
        }
    }
    return g;
}

} // namespace tempshift
