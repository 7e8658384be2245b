#include "tempshift/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include <json.hpp>

#include "tempshift/rng.hpp"

namespace tempshift {

namespace {

void validate(const SynthConfig& c) {
    if (c.n < 10) throw std::invalid_argument("synth: n must be >= 10");
    if (c.d < 1) throw std::invalid_argument("synth: d must be >= 1");
    if (c.w.size() != c.d)
        throw std::invalid_argument("synth: w must have one weight per feature");
    if (c.noise_std < 0.0) throw std::invalid_argument("synth: noise_std must be >= 0");
    if (c.end <= c.start) throw std::invalid_argument("synth: end must exceed start");
    for (const PeriodicComponent& p : c.components)
        if (p.period <= 0)
            throw std::invalid_argument("synth: periods must be positive");
}

struct Fnv {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    void bytes(const void* p, std::size_t n) {
        const unsigned char* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 0x100000001b3ULL;
        }
    }
    void u64(std::uint64_t v) { bytes(&v, sizeof v); }
    void i64(std::int64_t v) { bytes(&v, sizeof v); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        u64(bits);
    }
};

double signal_at(const SynthConfig& c, std::int64_t t, const double* x) {
    double s = 0.0;
    for (std::size_t j = 0; j < c.d; ++j) s += c.w[j] * x[j];
    s += c.trend_coeff * static_cast<double>(t - c.start) /
         static_cast<double>(c.end - c.start);
    for (const PeriodicComponent& p : c.components) {
        // Exact integer phase reduction keeps sin() arguments small.
        const std::int64_t r = ((t % p.period) + p.period) % p.period;
        s += p.amplitude *
             std::sin(2.0 * M_PI * static_cast<double>(r) /
                          static_cast<double>(p.period) +
                      p.phase);
    }
    return s;
}

} // namespace

std::uint64_t synth_fingerprint(const SynthConfig& c) {
    Fnv f;
    f.u64(c.n);
    f.u64(c.d);
    for (double w : c.w) f.f64(w);
    f.f64(c.trend_coeff);
    f.u64(c.components.size());
    for (const PeriodicComponent& p : c.components) {
        f.i64(p.period);
        f.f64(p.amplitude);
        f.f64(p.phase);
    }
    f.f64(c.noise_std);
    f.i64(c.start);
    f.i64(c.end);
    f.u64(c.task == Task::Classification ? 1 : 0);
    f.u64(c.seed);
    return f.h == 0 ? 1 : f.h; // keep 0 reserved for "not synthetic"
}

TemporalDataset generate(const SynthConfig& c) {
    validate(c);

    TemporalDataset ds;
    ds.task = c.task;
    ds.provenance = synth_fingerprint(c);
    ds.timestamps.resize(c.n);
    Rng time_rng(Rng::derive(c.seed, "synth-times"));
    const double span = static_cast<double>(c.end - c.start);
    for (std::size_t i = 0; i < c.n; ++i)
        ds.timestamps[i] =
            c.start + static_cast<std::int64_t>(time_rng.uniform01() * span);
    std::sort(ds.timestamps.begin(), ds.timestamps.end());

    ds.features = Matrix(c.n, c.d);
    Rng feat_rng(Rng::derive(c.seed, "synth-features"));
    for (double& v : ds.features.data) v = feat_rng.normal();
    ds.feature_names.resize(c.d);
    for (std::size_t j = 0; j < c.d; ++j) ds.feature_names[j] = "x" + std::to_string(j);

    std::vector<double> signal(c.n);
    for (std::size_t i = 0; i < c.n; ++i)
        signal[i] = signal_at(c, ds.timestamps[i], ds.features.row_ptr(i));

    Rng noise_rng(Rng::derive(c.seed, "synth-noise"));
    ds.labels.resize(c.n);
    if (c.task == Task::Regression) {
        for (std::size_t i = 0; i < c.n; ++i)
            ds.labels[i] = signal[i] + c.noise_std * noise_rng.normal();
    } else {
        std::vector<double> sorted = signal;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        const double median =
            n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
        for (std::size_t i = 0; i < c.n; ++i) {
            const double noisy = signal[i] + c.noise_std * noise_rng.normal();
            ds.labels[i] = noisy > median ? 1.0 : 0.0;
        }
    }
    return ds;
}

double oracle_predict(const SynthConfig& c, std::int64_t t,
                      const std::vector<double>& x) {
    validate(c);
    if (x.size() != c.d)
        throw std::invalid_argument("oracle_predict: feature width mismatch");
    return signal_at(c, t, x.data());
}

double oracle_rmse(const SynthConfig& c, const TemporalDataset& ds,
                   const std::vector<std::size_t>& rows) {
    validate(c);
    if (ds.provenance != synth_fingerprint(c))
        throw std::invalid_argument(
            "oracle_rmse: dataset was not generated by this config");
    if (c.task != Task::Regression)
        throw std::invalid_argument("oracle_rmse: defined for regression labels");
    if (rows.empty()) throw std::invalid_argument("oracle_rmse: no rows");
    double acc = 0.0;
    for (std::size_t r : rows) {
        const double pred = signal_at(c, ds.timestamps[r], ds.features.row_ptr(r));
        const double d = pred - ds.labels[r];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(rows.size()));
}

std::string synth_config_to_json(const SynthConfig& c) {
    nlohmann::json j;
    j["n"] = c.n;
    j["d"] = c.d;
    j["w"] = c.w;
    j["trend_coeff"] = c.trend_coeff;
    for (const PeriodicComponent& p : c.components)
        j["components"].push_back(
            {{"period", p.period}, {"amplitude", p.amplitude}, {"phase", p.phase}});
    if (c.components.empty()) j["components"] = nlohmann::json::array();
    j["noise_std"] = c.noise_std;
    j["start"] = c.start;
    j["end"] = c.end;
    j["task"] = task_name(c.task);
    j["seed"] = c.seed;
    j["fingerprint"] = synth_fingerprint(c);
    return j.dump(2);
}

SynthConfig synth_config_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    SynthConfig c;
    c.n = j.at("n").get<std::size_t>();
    c.d = j.at("d").get<std::size_t>();
    c.w = j.at("w").get<std::vector<double>>();
    c.trend_coeff = j.at("trend_coeff").get<double>();
    for (const auto& p : j.at("components"))
        c.components.push_back({p.at("period").get<std::int64_t>(),
                                p.at("amplitude").get<double>(),
                                p.at("phase").get<double>()});
    c.noise_std = j.at("noise_std").get<double>();
    c.start = j.at("start").get<std::int64_t>();
    c.end = j.at("end").get<std::int64_t>();
    c.task = task_from_name(j.at("task").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

} // namespace tempshift
