#pragma once

#include <cstdint>

namespace elliptail {

/// SplitMix64 output function.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Child seed for stream `index` of `seed`. Used for per-replicate and
/// per-sample streams so results do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Maps 64 random bits onto the open interval (0, 1) with 52-bit resolution.
double to_open_unit(std::uint64_t bits) noexcept;

/// Counter-based SplitMix64 stream. The k-th output is a pure function of
/// (seed, k), so any element can be computed without generating the ones
/// before it.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept;

  std::uint64_t bits_at(std::uint64_t counter) const noexcept;
  double uniform_at(std::uint64_t counter) const noexcept;

  std::uint64_t next_bits() noexcept { return bits_at(counter_++); }
  double next_uniform() noexcept { return uniform_at(counter_++); }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace elliptail
