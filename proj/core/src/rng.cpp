#include "elliptail/rng.hpp"

#include "elliptail/errors.hpp"

namespace elliptail {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::numeric_failure: return "numeric-failure";
    case ErrorKind::unsupported_family: return "unsupported-family";
    case ErrorKind::degenerate_correlation: return "degenerate-correlation";
    case ErrorKind::degenerate_tail: return "degenerate-tail";
    case ErrorKind::invalid_threshold: return "invalid-threshold";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(mix64(seed + kGamma) ^ mix64(index * kGamma + 0x632BE59BD9B4E019ULL));
}

double to_open_unit(std::uint64_t bits) noexcept {
  // 52 bits so that the largest value, 1 - 2^-53, is still below 1.
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

CounterRng::CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed)) {}

std::uint64_t CounterRng::bits_at(std::uint64_t counter) const noexcept {
  return mix64(key_ + (counter + 1) * kGamma);
}

double CounterRng::uniform_at(std::uint64_t counter) const noexcept {
  return to_open_unit(bits_at(counter));
}

}  // namespace elliptail
