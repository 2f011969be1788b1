// Counter-based pseudo-random generator for reproducible Monte-Carlo trials.
//
// Standard-library distributions (std::uniform_real_distribution and friends)
// produce implementation-defined streams, which would break golden-file
// reproducibility across toolchains.  This generator instead derives every
// variate as a pure function of (master_seed, trial_index, counter) using the
// splitmix64 finalizer, the same construction as Java's SplittableRandom.
// Draws are therefore order-independent: any thread may evaluate any counter
// and always obtains the same value.
#pragma once

#include <cstdint>

namespace latspec {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Identifies one Monte-Carlo trial within one experiment.
struct SampleSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
};

class CounterRng {
public:
  explicit CounterRng(SampleSeed seed)
      : stream_(splitmix64(splitmix64(seed.master_seed) ^
                           (seed.trial_index * 0x9E3779B97F4A7C15ULL +
                            0xD1B54A32D192ED03ULL))) {}

  std::uint64_t bits(std::uint64_t counter) const {
    return splitmix64(stream_ ^
                      (counter * 0xBF58476D1CE4E5B9ULL + 0x2545F4914F6CDD1DULL));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

private:
  std::uint64_t stream_;
};

}  // namespace latspec
