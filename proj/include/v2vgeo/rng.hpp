#pragma once

#include <cmath>
#include <cstdint>

namespace v2vgeo {

// Deterministic RNG with platform-independent output. std::normal_distribution
// and friends are implementation-defined, so sampling is done by hand here;
// identical seeds must give identical scenes and fading draws everywhere.

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Mix an arbitrary list of 64-bit words into one hash (for keyed draws).
inline uint64_t mix_key(std::initializer_list<uint64_t> words) {
    uint64_t h = 0x2545F4914F6CDD1DULL;
    for (uint64_t w : words) {
        h ^= w + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
        uint64_t s = h;
        h = splitmix64(s);
    }
    return h;
}

class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64(state_); }

    /// Uniform in (0, 1]; never returns 0 so log() is safe.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Box-Muller; consumes two uniforms per call.
    double normal(double mean, double sigma) {
        double u1 = uniform01();
        double u2 = uniform01();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        return mean + sigma * z;
    }

    double exponential(double mean) { return -mean * std::log(uniform01()); }

    /// Uniform integer in [0, n).
    uint64_t below(uint64_t n) {
        // Multiply-shift; bias is negligible for n << 2^64.
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        return static_cast<uint64_t>(m >> 64);
    }

  private:
    uint64_t state_;
};

} // namespace v2vgeo
