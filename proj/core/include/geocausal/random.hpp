#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace geocausal {

/// Derives an independent child seed from a parent seed and a path of
/// indices (splitmix64 chaining). Used to pre-split RNG streams so serial and
/// parallel runs draw identical numbers.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path);

/// mt19937_64 with distribution mappings that do not depend on the standard
/// library implementation, so seeded outputs are portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 12) + 0.5) * 0x1.0p-52;
  }

  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

  /// Fisher-Yates permutation of 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace geocausal
