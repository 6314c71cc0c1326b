#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

// Counter-based random streams. A stream is identified by a 64-bit key and
// produces mix(key, counter) for counter = 0, 1, 2, ..., so any draw can be
// regenerated without replaying the ones before it. Transforms to uniform and
// normal variates are written out here (not taken from <random>) so that
// sequences are identical across standard library implementations.
namespace nodal::rng {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

std::uint64_t combine(std::uint64_t a, std::uint64_t b);

/// FNV-1a over the bytes of a string.
std::uint64_t hash_string(std::string_view text);

/// Seed of trial `index` of a run with the given master seed.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index);

class CounterStream {
 public:
  using result_type = std::uint64_t;

  explicit CounterStream(std::uint64_t key) : key_(mix64(key ^ 0x6a09e667f3bcc909ULL)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Uniform in (0, 1].
  double uniform_open_low();

  /// Standard normal (Box-Muller, both variates used).
  double normal();

  /// Uniform integer in [0, bound) without modulo bias.
  std::uint64_t below(std::uint64_t bound);

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace nodal::rng
