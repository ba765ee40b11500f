#pragma once

#include <cstdint>

#include "seqtest/math_util.hpp"

namespace seqtest {

// SplitMix64: tiny, fast, and trivially splittable.  Each Monte Carlo
// replication gets its own stream keyed by (seed, replication index), so
// serial and parallel runs consume exactly the same random numbers.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t s) : state(s) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0,1); never returns 0 or 1, so it is
    // safe to push through the normal quantile function.
    double uniform01() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() { return inverse_normal_cdf(uniform01()); }
};

inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    SplitMix64 g(seed ^ (stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
    return g.next();
}

// Dedicated stream for one replication of one evaluation parameter.
inline SplitMix64 replication_rng(uint64_t seed, uint64_t param_index, uint64_t rep) {
    return SplitMix64(mix_seed(mix_seed(seed, param_index), rep));
}

}  // namespace seqtest
