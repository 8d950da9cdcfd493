#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "elliptail/model.hpp"

namespace elliptail {

/// Shortest decimal text that round-trips the double.
std::string format_double(double v);

/// RFC-4180 field quoting: quotes only when the field contains a comma,
/// quote, or line break.
std::string csv_field(std::string_view s);

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Reads a sample with header `x,y`.
PairedSample read_pairs_csv(std::istream& in);
PairedSample read_pairs_csv(const std::filesystem::path& path);
void write_pairs_csv(std::ostream& out, const PairedSample& sample);

/// Reads one named column (header required) of a CSV file as doubles.
std::vector<double> read_csv_column(const std::filesystem::path& path,
                                    std::string_view column);

}  // namespace elliptail
