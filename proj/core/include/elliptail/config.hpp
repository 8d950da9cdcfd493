#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elliptail/model.hpp"

namespace elliptail {

/// Flat `key = value` configuration in a small TOML subset: `#` comments,
/// quoted strings, numbers, booleans, and one-line arrays `[a, b, c]`.
/// Section headers are rejected.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(std::string_view key) const;
  std::string get_string(std::string_view key) const;
  std::string get_string(std::string_view key, std::string fallback) const;
  double get_double(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;
  long long get_int(std::string_view key) const;
  long long get_int(std::string_view key, long long fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  std::vector<double> get_doubles(std::string_view key) const;
  std::vector<std::string> get_strings(std::string_view key) const;

  std::vector<std::string> keys() const;

 private:
  const std::string& raw(std::string_view key) const;
  std::map<std::string, std::string, std::less<>> values_;
};

/// Builds a model from `radial`, `beta`/`nu`, `rho`, `mu_x`, `mu_y`,
/// `sigma_x`, `sigma_y` (locations default to 0, scales to 1).
EllipticalModel model_from_config(const KeyValueConfig& config);

}  // namespace elliptail
