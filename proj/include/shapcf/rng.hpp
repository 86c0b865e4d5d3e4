#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace shapcf {

// Stream-splitting rule: a child seed is a SplitMix64 finalisation of the
// parent seed mixed with the stream index. Children of the same parent with
// different indices are statistically independent, and a child depends only
// on (parent seed, index), never on how much the parent has been consumed.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept;

// Thin wrapper over std::mt19937_64 that remembers its seed so independent
// per-component streams can be forked deterministically.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t seed() const noexcept { return seed_; }

  Rng fork(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

  // Uniform on [0, n).
  std::size_t uniform_index(std::size_t n);
  // Uniform on [lo, hi].
  std::size_t uniform_int(std::size_t lo, std::size_t hi);
  double uniform01();
  double normal(double mean, double sd);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace shapcf
