#pragma once

#include <cmath>
#include <cstdint>
#include <array>
#include <numbers>

#include "ntci/errors.hpp"

namespace ntci::rng {

// Philox4x32-10 block cipher (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3", SC 2011). Stateless: output is a pure function of
// (counter, key), which is what makes ensembles reproducible regardless of
// worker count or evaluation order.
struct PhiloxBlock {
    std::array<std::uint32_t, 4> words;
};

namespace detail {

constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;
constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

inline void philox_round(std::array<std::uint32_t, 4>& c, std::array<std::uint32_t, 2>& k) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mul_hi_lo(kMulA, c[0], lo0, hi0);
    mul_hi_lo(kMulB, c[2], lo1, hi1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeylA;
    k[1] += kWeylB;
}

}  // namespace detail

inline PhiloxBlock philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        detail::philox_round(counter, key);
    }
    return PhiloxBlock{counter};
}

// Uniform double in (0, 1]: top 53 bits, shifted away from zero so that
// log(u) below is always finite.
inline double uniform_open_closed(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Uniform double in [0, 1).
inline double uniform_closed_open(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// A stream of standard normals indexed by (step, component). Each Philox
// block yields a Box-Muller pair, so component k lives in block k/2.
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_lo_(static_cast<std::uint32_t>(stream_id)),
          stream_hi_(static_cast<std::uint32_t>(stream_id >> 32)) {}

    // Standard normal for (step, component). Pure function of
    // (seed, stream_id, step, component).
    double normal(std::uint64_t step, std::uint32_t component) const {
        const std::uint32_t block = component >> 1;
        const PhiloxBlock out = philox4x32(
            {static_cast<std::uint32_t>(step),
             static_cast<std::uint32_t>(step >> 32) ^ stream_hi_,
             stream_lo_, block},
            key_);
        const std::uint64_t b0 =
            (static_cast<std::uint64_t>(out.words[0]) << 32) | out.words[1];
        const std::uint64_t b1 =
            (static_cast<std::uint64_t>(out.words[2]) << 32) | out.words[3];
        const double u1 = uniform_open_closed(b0);
        const double u2 = uniform_closed_open(b1);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return (component & 1u) ? r * std::sin(angle) : r * std::cos(angle);
    }

    std::uint64_t stream_id() const {
        return (static_cast<std::uint64_t>(stream_hi_) << 32) | stream_lo_;
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
};

// Derive an unrelated seed from a base seed (splitmix64 finalizer), used for
// independent companion ensembles.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace ntci::rng

namespace ntci {

// Brownian increments for one trajectory: increment(step, j) is the j-th
// component of W(t_{step+1}) - W(t_step), variance dt. Counter-based, so a
// plan can be shared across threads and replayed in any order.
class NoisePlan {
public:
    NoisePlan(std::uint64_t seed, std::uint64_t stream_id, int noise_dim, double dt)
        : stream_(seed, stream_id), noise_dim_(noise_dim), sqrt_dt_(std::sqrt(dt)) {
        if (noise_dim < 1) throw domain_error("NoisePlan: noise_dim must be >= 1");
        if (!(dt > 0.0)) throw domain_error("NoisePlan: dt must be > 0");
    }

    double gaussian(std::uint64_t step, int component) const {
        return stream_.normal(step, static_cast<std::uint32_t>(component));
    }

    double increment(std::uint64_t step, int component) const {
        return gaussian(step, component) * sqrt_dt_;
    }

    int noise_dim() const { return noise_dim_; }
    std::uint64_t stream_id() const { return stream_.stream_id(); }

private:
    rng::GaussianStream stream_;
    int noise_dim_;
    double sqrt_dt_;
};

}  // namespace ntci
