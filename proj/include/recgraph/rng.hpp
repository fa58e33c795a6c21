#ifndef RECGRAPH_RNG_HPP
#define RECGRAPH_RNG_HPP

#include <cstdint>
#include <vector>

namespace recgraph {

// splitmix64 finalizer; full-period, passes BigCrush as a mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless hash of (seed, index). Indexed draws are order-independent,
// which is what makes two-sided window extension idempotent.
inline std::uint64_t hash2(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) ^ index);
}

inline std::uint64_t hash3(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return mix64(hash2(seed, a) ^ mix64(b + 0x3c6ef372fe94f82bULL));
}

inline double to_unit_double(std::uint64_t bits) {
    // 53 high bits -> [0, 1)
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Small sequential engine (splitmix64 stream). Used by samplers; kept
// self-contained so results are bit-identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double next_unit() { return to_unit_double(next_u64()); }

    // Uniform integer in [0, n), n >= 1. Rejection-free multiply-shift.
    std::uint64_t next_below(std::uint64_t n) {
        // 128-bit multiply keeps the distribution exact enough for n << 2^64.
        unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t state_;
};

// Per-sample seed derivation: deterministic regardless of how samples are
// sharded across threads.
inline std::uint64_t sample_seed(std::uint64_t base_seed, std::uint64_t sample_index) {
    return hash2(base_seed ^ 0x243f6a8885a308d3ULL, sample_index);
}

} // namespace recgraph

#endif
