#include "elliptail/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "elliptail/errors.hpp"

namespace elliptail {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Drops a trailing `#` comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return std::string(s.substr(1, s.size() - 2));
  }
  return std::string(s);
}

double to_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::invalid_argument,
                "config key '" + std::string(key) + "' is not a number: " + std::string(text));
  }
  return v;
}

std::vector<std::string_view> split_array(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text.size() < 2 || text.front() != '[' || text.back() != ']') {
    throw Error(ErrorKind::invalid_argument,
                "config key '" + std::string(key) + "' is not an array");
  }
  text = trim(text.substr(1, text.size() - 2));
  std::vector<std::string_view> items;
  while (!text.empty()) {
    const auto comma = text.find(',');
    items.push_back(trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text = trim(text.substr(comma + 1));
  }
  return items;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      throw Error(ErrorKind::invalid_argument,
                  "config line " + std::to_string(line_no) + ": sections are not supported");
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::invalid_argument,
                  "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw Error(ErrorKind::invalid_argument,
                  "config line " + std::to_string(line_no) + ": empty key or value");
    }
    config.values_[key] = std::string(value);
  }
  return config;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool KeyValueConfig::contains(std::string_view key) const {
  return values_.find(key) != values_.end();
}

const std::string& KeyValueConfig::raw(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    throw Error(ErrorKind::invalid_argument, "missing config key '" + std::string(key) + "'");
  }
  return it->second;
}

std::string KeyValueConfig::get_string(std::string_view key) const { return unquote(raw(key)); }

std::string KeyValueConfig::get_string(std::string_view key, std::string fallback) const {
  return contains(key) ? get_string(key) : fallback;
}

double KeyValueConfig::get_double(std::string_view key) const {
  return to_double(key, raw(key));
}

double KeyValueConfig::get_double(std::string_view key, double fallback) const {
  return contains(key) ? get_double(key) : fallback;
}

long long KeyValueConfig::get_int(std::string_view key) const {
  const std::string_view text = trim(raw(key));
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::invalid_argument,
                "config key '" + std::string(key) + "' is not an integer");
  }
  return v;
}

long long KeyValueConfig::get_int(std::string_view key, long long fallback) const {
  return contains(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool(std::string_view key, bool fallback) const {
  if (!contains(key)) return fallback;
  const std::string v = get_string(key);
  if (v == "true") return true;
  if (v == "false") return false;
  throw Error(ErrorKind::invalid_argument, "config key '" + std::string(key) + "' is not a boolean");
}

std::vector<double> KeyValueConfig::get_doubles(std::string_view key) const {
  std::vector<double> out;
  for (std::string_view item : split_array(key, raw(key))) out.push_back(to_double(key, item));
  return out;
}

std::vector<std::string> KeyValueConfig::get_strings(std::string_view key) const {
  std::vector<std::string> out;
  for (std::string_view item : split_array(key, raw(key))) out.push_back(unquote(item));
  return out;
}

std::vector<std::string> KeyValueConfig::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

EllipticalModel model_from_config(const KeyValueConfig& config) {
  const std::string family = config.get_string("radial");
  double param = 0.0;
  const RadialFamily f = parse_radial_family(family);
  if (f == RadialFamily::kotz) param = config.get_double("beta");
  if (f == RadialFamily::student) param = config.get_double("nu");
  return EllipticalModel(config.get_double("mu_x", 0.0), config.get_double("mu_y", 0.0),
                         config.get_double("sigma_x", 1.0), config.get_double("sigma_y", 1.0),
                         config.get_double("rho"), RadialLaw::by_name(family, param));
}

}  // namespace elliptail
