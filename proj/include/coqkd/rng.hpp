#pragma once

#include <cstdint>

namespace coqkd {

/// Counter-based per-round generator. Each protocol round derives its own
/// stream from (master seed, round index), so rounds can run in any order or
/// in parallel and still reproduce the same draws.
class RoundRng {
public:
  RoundRng(std::uint64_t master_seed, std::uint64_t round_index)
      : state_(scramble(master_seed +
                        0x9E3779B97F4A7C15ULL * (round_index + 1))) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, k).
  int pick(int k) { return static_cast<int>(uniform() * k); }

private:
  static std::uint64_t scramble(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

/// Derives a child seed, e.g. one per sweep point or per design input.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return RoundRng(master, index).next_u64();
}

}  // namespace coqkd
