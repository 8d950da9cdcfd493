#include "elliptail/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "elliptail/errors.hpp"

namespace elliptail {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

double parse_number(const std::string& text, std::size_t line_no) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t')) --end;
  if (begin < end && *begin == '+') ++begin;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::invalid_argument,
                "CSV line " + std::to_string(line_no) + ": not a number: '" + text + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_field(fields[i]);
  }
  out << '\n';
}

PairedSample read_pairs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorKind::insufficient_data, "CSV input is empty");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_line(line);
  if (header.size() != 2 || header[0] != "x" || header[1] != "y") {
    throw Error(ErrorKind::invalid_argument, "CSV header must be 'x,y'");
  }
  std::vector<Point> pairs;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_line(line);
    if (fields.size() != 2) {
      throw Error(ErrorKind::invalid_argument,
                  "CSV line " + std::to_string(line_no) + ": expected 2 fields");
    }
    pairs.push_back({parse_number(fields[0], line_no), parse_number(fields[1], line_no)});
  }
  return PairedSample(std::move(pairs));
}

PairedSample read_pairs_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open data file " + path.string());
  return read_pairs_csv(in);
}

void write_pairs_csv(std::ostream& out, const PairedSample& sample) {
  out << "x,y\n";
  for (const Point& p : sample.pairs()) out << format_double(p.x) << ',' << format_double(p.y) << '\n';
}

std::vector<double> read_csv_column(const std::filesystem::path& path, std::string_view column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open data file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::insufficient_data, "CSV input is empty");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_line(line);
  std::size_t index = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == column) index = i;
  }
  if (index == header.size()) {
    throw Error(ErrorKind::invalid_argument, "CSV has no column '" + std::string(column) + "'");
  }
  std::vector<double> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::invalid_argument,
                  "CSV line " + std::to_string(line_no) + ": wrong field count");
    }
    const double v = parse_number(fields[index], line_no);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::invalid_argument, "CSV contains a non-finite value");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace elliptail
