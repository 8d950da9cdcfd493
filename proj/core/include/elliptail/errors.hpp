#pragma once

#include <stdexcept>
#include <string>

namespace elliptail {

enum class ErrorKind {
  domain,
  numeric_failure,
  unsupported_family,
  degenerate_correlation,
  degenerate_tail,
  invalid_threshold,
  insufficient_data,
  invalid_argument,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every error raised by the library. `kind()` is stable and is what
/// the CLI prints in its machine-readable diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Iterative routine that did not meet its tolerance. Carries the best
/// available bracket or error estimate.
class NumericFailure : public Error {
 public:
  NumericFailure(const std::string& what, double lower, double upper)
      : Error(ErrorKind::numeric_failure, what), lower_(lower), upper_(upper) {}

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  double lower_;
  double upper_;
};

}  // namespace elliptail
