#pragma once

#include <cstdint>

namespace gazebc {

// Seedable generator with a fixed algorithm (xoroshiro128+ seeded through
// splitmix64) so streams are identical across platforms and standard library
// versions. Same seed => same stream, which the whole pipeline relies on.
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    // Uniform on [0, 1).
    double uniform();
    double uniform(double lo, double hi);

    // Inclusive on both ends.
    int uniform_int(int lo, int hi);

    // Standard normal via Box-Muller (the spare value is cached).
    double normal();
    double normal(double mean, double stddev);

    // Independent child stream; deterministic in (seed, stream).
    Rng split(std::uint64_t stream) const;

  private:
    std::uint64_t state_[2];
    std::uint64_t seed_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace gazebc
