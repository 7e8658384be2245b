#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace tempshift {

/// Deterministic 64-bit PRNG (splitmix64). All randomness in the library goes
/// through this generator so that a given seed reproduces runs exactly on any
/// platform with the same floating point environment. The constants are the
/// reference ones from Steele et al.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). Multiply-shift bound (Lemire); the modulo
    /// bias at 64 bits is negligible and the draw is exactly reproducible.
    std::uint64_t bounded(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Standard normal via Box-Muller (two uniforms per pair, cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// Derive an independent stream for a tagged purpose (epoch shuffles,
    /// dropout masks, ...) without correlating with the parent stream.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
        Rng r(seed ^ (tag * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
        return r.next_u64();
    }

    /// Same, with a readable tag (FNV-1a hashed).
    static std::uint64_t derive(std::uint64_t seed, const char* tag) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (const char* p = tag; *p; ++p) {
            h ^= static_cast<unsigned char>(*p);
            h *= 0x100000001b3ULL;
        }
        return derive(seed, h);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace tempshift
