#pragma once

#include <cstdint>
#include <limits>

namespace selinf {

/// SplitMix64, usable as the engine of any <random> distribution. Cheap to
/// seed, so every repetition or Monte Carlo draw gets its own stream and
/// results do not depend on evaluation order.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed of stream `index` under a run seed.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (0xd1b54a32d192ed03ULL * (index + 1)));
  g();
  return g();
}

}  // namespace selinf
