#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hypersde::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal line chart: one polyline per series, axis box with min/max
/// labels and a legend. Non-finite points are dropped.
void write_svg_chart(std::ostream& os, const std::string& title, const std::vector<Series>& series,
                     const std::string& x_label = "t", const std::string& y_label = "");

}  // namespace hypersde::cli
