#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hypersde {

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double x);

/// Writes one CSV row; fields are joined by commas, terminated by '\n'.
void write_csv_row(std::ostream& os, std::span<const std::string> fields);
void write_csv_row(std::ostream& os, std::span<const double> values);

}  // namespace hypersde
