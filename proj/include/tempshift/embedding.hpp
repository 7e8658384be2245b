#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tempshift/matrix.hpp"

namespace tempshift {

/// Mean-Gregorian period constants in seconds (month = year/12).
namespace periods {
inline constexpr std::int64_t hour = 3600;
inline constexpr std::int64_t day = 86400;
inline constexpr std::int64_t week = 604800;
inline constexpr std::int64_t month = 2629746;
inline constexpr std::int64_t year = 31556952;
} // namespace periods

/// Resolve "hour"/"day"/"week"/"month"/"year" or a raw second count.
std::int64_t period_from_name(const std::string& name);

struct FourierComponent {
    std::int64_t period = 0; // seconds, > 0
    int order = 0;           // harmonics K; 0 = component excluded
};

struct FourierSpec {
    std::vector<FourierComponent> components;

    /// Components with order >= 1, in spec order.
    std::vector<FourierComponent> active() const;
    /// Sum of 2*K over active components.
    std::size_t periodic_width() const;
};

enum class EncoderMode { None, Num, Timeparts, Fourier };
enum class Attachment { AsFeatures, ToBackbone };

std::string encoder_mode_str(EncoderMode m);
EncoderMode encoder_mode_from_str(const std::string& s);
std::string attachment_str(Attachment a);
Attachment attachment_from_str(const std::string& s);

struct TrendStats {
    double mean = 0.0;
    double std = 1.0; // > 0
};

struct TemporalEncoderConfig {
    EncoderMode mode = EncoderMode::None;
    FourierSpec spec;           // fourier mode
    bool trend = false;         // append standardized timestamp
    int d_embedding = 0;        // 0 = bypass the Linear+ReLU projection
    bool learnable_frequencies = false;
    Attachment attachment = Attachment::AsFeatures;

    /// none -> 0; num -> 1; timeparts -> 6;
    /// fourier -> (d_embedding if > 0 else periodic width) + (1 if trend).
    std::size_t output_width() const;
};

/// Learnable (and fitted) state of the encoder.
///
/// Fixed-frequency mode computes phases by exact integer reduction of t mod
/// period, so the periodic branch repeats bit-for-bit. Learnable mode instead
/// works in normalized time tau = (t - t_ref) / t_span (fitted on train rows)
/// with per-harmonic angular frequencies initialized to 2*pi*k*t_span/period;
/// tau stays O(1), which keeps frequency gradients well-conditioned.
struct EncoderParams {
    Matrix W;               // d_embedding x periodic_width
    std::vector<double> b;  // d_embedding
    std::vector<double> frequencies; // per (component, harmonic); learnable mode only
    TrendStats trend_stats;
    double t_ref = 0.0;
    double t_span = 1.0;
};

/// [sin(2*pi*k*t/T), cos(2*pi*k*t/T)] interleaved for k = 1..K.
std::vector<double> fourier_features(std::int64_t t, std::int64_t period, int order);

/// Concatenation of fourier_features over the active components of `spec`.
/// Throws std::invalid_argument when no component is active.
std::vector<double> periodic_concat(std::int64_t t, const FourierSpec& spec);

/// UTC civil decomposition [year, month, day, hour, minute, second] as reals.
std::vector<double> timeparts(std::int64_t t);

/// Standardized timestamp (t - mean) / std.
double trend(std::int64_t t, const TrendStats& stats);

/// Fit trend stats / normalized-time anchors on the train rows and draw the
/// projection from U[-1/sqrt(fan_in), +1/sqrt(fan_in)] (seeded).
EncoderParams init_encoder(const TemporalEncoderConfig& config,
                           const std::vector<std::int64_t>& train_timestamps,
                           std::uint64_t seed);

/// Intermediate values needed by encoder_backward.
struct EncoderCache {
    Matrix periodic; // n x periodic_width
    Matrix pre_act;  // n x d_embedding, before ReLU (projection path only)
    std::vector<double> tau; // n, learnable mode only
};

/// Encode one timestamp per row of `ts` into an n x output_width matrix.
Matrix encode_batch(const std::vector<std::int64_t>& ts,
                    const TemporalEncoderConfig& config, const EncoderParams& params,
                    EncoderCache* cache = nullptr);

/// Single-timestamp convenience wrapper over encode_batch.
std::vector<double> encode(std::int64_t t, const TemporalEncoderConfig& config,
                           const EncoderParams& params);

struct EncoderGrads {
    Matrix dW;
    std::vector<double> db;
    std::vector<double> dfrequencies; // empty unless learnable_frequencies
};

/// Chain rule through [ReLU(Linear(Periodic)), Trend] for a batch gradient
/// d(loss)/d(embedding) of shape n x output_width. The trend column has no
/// parameters; its gradient slice is ignored.
EncoderGrads encoder_backward(const Matrix& d_embedding,
                              const TemporalEncoderConfig& config,
                              const EncoderParams& params, const EncoderCache& cache);

} // namespace tempshift
