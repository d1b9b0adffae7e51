#pragma once

// Minimal static SVG line charts for run reports. Internal.

#include <string>
#include <utility>
#include <vector>

namespace crowdsense::detail {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y), x ascending
};

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series);

}  // namespace crowdsense::detail
