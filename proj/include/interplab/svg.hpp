#pragma once

#include <optional>
#include <string>
#include <vector>

namespace interplab {

struct SvgSeries {
  std::string name;
  std::string color;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> std_dev;  // +-1 std whiskers; empty for none
};

struct SvgPlotSpec {
  std::string title;
  std::string x_label, y_label;
  bool log_x = true;
  bool log_y = false;
  std::optional<double> vline_x;  // e.g. the d = n marker
  std::vector<SvgSeries> series;
};

// Minimal polyline plot writer; no plotting dependency.
std::string render_line_plot(const SvgPlotSpec& spec);

}  // namespace interplab
