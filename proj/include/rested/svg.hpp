#pragma once

#include <string>
#include <utility>
#include <vector>

namespace rested {

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // plotted in given order
};

struct PlotAxes {
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

// Standalone 720x480 SVG line chart: one polyline per series plus point
// markers, 5 ticks per axis, legend, no external assets. Axis bounds cover
// the data extent with a 5% margin (taken in log space on a log axis).
// Byte output is deterministic for identical input. Throws
// std::invalid_argument when there is no series, a series has no points,
// or a log axis meets a nonpositive coordinate.
std::string render_svg_plot(const std::vector<PlotSeries>& series,
                            const PlotAxes& axes);
void emit_svg_plot(const std::vector<PlotSeries>& series,
                   const std::string& path, const PlotAxes& axes);

}  // namespace rested
