#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rgl::cli {

struct Series {
  std::string label;
  std::vector<double> y;  ///< y[k] plotted at x = k
};

/// Static line chart with a logarithmic y axis. Nonpositive values are
/// clamped to the smallest positive value in the data.
void write_svg(std::ostream& out, const std::string& title, const std::string& y_label,
               const std::vector<Series>& series);

}  // namespace rgl::cli
