#pragma once

#include <cmath>
#include <cstdint>

namespace vtx {

/// Counter-based generator: output k of stream `seed` is the SplitMix64
/// finalizer applied to seed + k * golden. Stateless apart from the counter,
/// so any draw is reproducible from (seed, index) alone and disjoint streams
/// are built by remixing the seed with a stream index.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : base_(stream == 0 ? seed : mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t next_u64() { return mix(base_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

    /// Uniform double in [0,1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal pair via Box-Muller; u1 is kept away from 0.
    void next_gaussian_pair(double& g0, double& g1) {
        double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        g0 = r * std::cos(a);
        g1 = r * std::sin(a);
    }

    std::uint64_t counter() const { return counter_; }

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

  private:
    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

}  // namespace vtx
