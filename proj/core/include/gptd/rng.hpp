#pragma once

#include <cstdint>

namespace gptd {

// Counter-based generator: the i-th draw is splitmix64(key + i * golden).
// split() derives an independent child stream from (key, stream id), so every
// consumer of randomness gets its own reproducible sequence from one seed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

  CounterRng split(std::uint64_t stream) const;

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform on {0, ..., n-1}; n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  // Standard normal via Box-Muller; one value per call.
  double normal();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z);

 private:
  CounterRng(std::uint64_t key, std::uint64_t counter, int) : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gptd
