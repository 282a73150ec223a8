#pragma once

#include <cstdint>

#include "lvexp/gaussian.hpp"

namespace lvexp {

// Stream ids: one independent substream per purpose so that path layouts do
// not depend on how many variates another purpose consumed.
inline constexpr std::uint64_t kStreamBrownian = 0;
inline constexpr std::uint64_t kStreamJumpCount = 1;
inline constexpr std::uint64_t kStreamJumpTimes = 2;
inline constexpr std::uint64_t kStreamJumpSizes = 3;

/** Counter-based generator: the variate at (seed, path, stream, idx) is a pure
 *  function of the four coordinates, so results are reproducible regardless of
 *  evaluation order or the number of worker threads. */
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t path, std::uint64_t stream)
        : seed_(seed), path_(path), stream_(stream), idx_(0) {}

    // Uniform in (0, 1), never exactly 0 or 1.
    double next_uniform() {
        std::uint64_t h = hash(idx_++);
        double u = (h >> 11) * 0x1.0p-53;
        if (u <= 0.0) u = 0x1.0p-53;
        return u;
    }

    double next_normal() { return inv_norm_cdf(next_uniform()); }

    std::uint64_t raw(std::uint64_t idx) const { return hash(idx); }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t hash(std::uint64_t idx) const {
        std::uint64_t h = mix(seed_ ^ 0x4cf5ad432745937fULL);
        h = mix(h ^ path_);
        h = mix(h ^ (stream_ * 0xd1342543de82ef95ULL));
        h = mix(h ^ idx);
        return mix(h);
    }

    std::uint64_t seed_, path_, stream_, idx_;
};

}  // namespace lvexp
