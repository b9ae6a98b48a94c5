#pragma once

#include <string>
#include <vector>

namespace dyner::plot {

struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  // Optional shaded band; empty when the series is a plain curve.
  std::vector<double> lo;
  std::vector<double> hi;
};

/// Self-contained SVG line chart with axes, ticks and a legend.
std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series);

}  // namespace dyner::plot
