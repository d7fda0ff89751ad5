#include "rested/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rested {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 64.0;
constexpr double kRight = 160.0;  // room for the legend
constexpr double kTop = 24.0;
constexpr double kBottom = 48.0;
constexpr double kPlotX0 = kLeft;
constexpr double kPlotX1 = kWidth - kRight;
constexpr double kPlotY0 = kTop;
constexpr double kPlotY1 = kHeight - kBottom;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                "#9467bd", "#8c564b", "#e377c2"};
constexpr int kPaletteSize = 7;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

struct AxisScale {
  bool log = false;
  double lo = 0.0;  // padded bounds in transformed (maybe log10) space
  double hi = 1.0;

  double transform(double v) const { return log ? std::log10(v) : v; }
  double unit(double v) const {  // -> [0, 1]
    return (transform(v) - lo) / (hi - lo);
  }
};

AxisScale make_scale(bool log, double data_lo, double data_hi) {
  AxisScale sc;
  sc.log = log;
  double lo = sc.transform(data_lo);
  double hi = sc.transform(data_hi);
  double span = hi - lo;
  if (span <= 0.0) span = 1.0;  // flat data: open up a unit window
  lo -= 0.05 * span;
  hi += 0.05 * span;
  sc.lo = lo;
  sc.hi = hi;
  return sc;
}

}  // namespace

std::string render_svg_plot(const std::vector<PlotSeries>& series,
                            const PlotAxes& axes) {
  if (series.empty()) {
    throw std::invalid_argument("plot: at least one series required");
  }
  double xlo = 0.0, xhi = 0.0, ylo = 0.0, yhi = 0.0;
  bool first = true;
  for (const auto& s : series) {
    if (s.points.empty()) {
      throw std::invalid_argument("plot: series has no points: " + s.label);
    }
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) {
        throw std::invalid_argument("plot: nonfinite coordinate");
      }
      if ((axes.log_x && x <= 0.0) || (axes.log_y && y <= 0.0)) {
        throw std::invalid_argument(
            "plot: nonpositive coordinate on a log axis");
      }
      if (first) {
        xlo = xhi = x;
        ylo = yhi = y;
        first = false;
      } else {
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, x);
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
      }
    }
  }
  const AxisScale sx = make_scale(axes.log_x, xlo, xhi);
  const AxisScale sy = make_scale(axes.log_y, ylo, yhi);
  const auto px = [&](double x) {
    return kPlotX0 + sx.unit(x) * (kPlotX1 - kPlotX0);
  };
  const auto py = [&](double y) {
    return kPlotY1 - sy.unit(y) * (kPlotY1 - kPlotY0);
  };

  std::string out;
  out +=
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" "
      "height=\"480\" viewBox=\"0 0 720 480\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n";
  out += "<rect width=\"720\" height=\"480\" fill=\"#ffffff\"/>\n";

  // Grid, ticks, tick labels: 5 stops per axis, even in scale space.
  for (int i = 0; i < 5; ++i) {
    const double t = static_cast<double>(i) / 4.0;
    const double gx = kPlotX0 + t * (kPlotX1 - kPlotX0);
    const double gy = kPlotY1 - t * (kPlotY1 - kPlotY0);
    const double xv_t = sx.lo + t * (sx.hi - sx.lo);
    const double yv_t = sy.lo + t * (sy.hi - sy.lo);
    const double xv = sx.log ? std::pow(10.0, xv_t) : xv_t;
    const double yv = sy.log ? std::pow(10.0, yv_t) : yv_t;
    out += "<line x1=\"" + fmt("%.2f", gx) + "\" y1=\"" +
           fmt("%.2f", kPlotY0) + "\" x2=\"" + fmt("%.2f", gx) + "\" y2=\"" +
           fmt("%.2f", kPlotY1) + "\" stroke=\"#dddddd\"/>\n";
    out += "<line x1=\"" + fmt("%.2f", kPlotX0) + "\" y1=\"" +
           fmt("%.2f", gy) + "\" x2=\"" + fmt("%.2f", kPlotX1) + "\" y2=\"" +
           fmt("%.2f", gy) + "\" stroke=\"#dddddd\"/>\n";
    out += "<text x=\"" + fmt("%.2f", gx) + "\" y=\"" +
           fmt("%.2f", kPlotY1 + 16.0) +
           "\" text-anchor=\"middle\" fill=\"#333333\">" + fmt("%.4g", xv) +
           "</text>\n";
    out += "<text x=\"" + fmt("%.2f", kPlotX0 - 6.0) + "\" y=\"" +
           fmt("%.2f", gy + 4.0) +
           "\" text-anchor=\"end\" fill=\"#333333\">" + fmt("%.4g", yv) +
           "</text>\n";
  }
  out += "<rect x=\"" + fmt("%.2f", kPlotX0) + "\" y=\"" +
         fmt("%.2f", kPlotY0) + "\" width=\"" +
         fmt("%.2f", kPlotX1 - kPlotX0) + "\" height=\"" +
         fmt("%.2f", kPlotY1 - kPlotY0) +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";

  // Axis labels.
  out += "<text x=\"" + fmt("%.2f", (kPlotX0 + kPlotX1) / 2.0) + "\" y=\"" +
         fmt("%.2f", kHeight - 12.0) + "\" text-anchor=\"middle\">" +
         escape_xml(axes.x_label) + "</text>\n";
  out += "<text x=\"16\" y=\"" + fmt("%.2f", (kPlotY0 + kPlotY1) / 2.0) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fmt("%.2f", (kPlotY0 + kPlotY1) / 2.0) + ")\">" +
         escape_xml(axes.y_label) + "</text>\n";

  // Data: one polyline per series plus point markers.
  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % kPaletteSize];
    std::string pts;
    for (const auto& [x, y] : series[si].points) {
      if (!pts.empty()) pts += ' ';
      pts += fmt("%.2f", px(x)) + "," + fmt("%.2f", py(y));
    }
    out += std::string("<polyline fill=\"none\" stroke=\"") + color +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    for (const auto& [x, y] : series[si].points) {
      out += "<circle cx=\"" + fmt("%.2f", px(x)) + "\" cy=\"" +
             fmt("%.2f", py(y)) + "\" r=\"2\" fill=\"" + color + "\"/>\n";
    }
  }

  // Legend in the right margin.
  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % kPaletteSize];
    const double ly = kPlotY0 + 8.0 + 18.0 * static_cast<double>(si);
    out += std::string("<line x1=\"") + fmt("%.2f", kPlotX1 + 10.0) +
           "\" y1=\"" + fmt("%.2f", ly) + "\" x2=\"" +
           fmt("%.2f", kPlotX1 + 34.0) + "\" y2=\"" + fmt("%.2f", ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fmt("%.2f", kPlotX1 + 40.0) + "\" y=\"" +
           fmt("%.2f", ly + 4.0) + "\">" + escape_xml(series[si].label) +
           "</text>\n";
  }

  out += "</svg>\n";
  return out;
}

void emit_svg_plot(const std::vector<PlotSeries>& series,
                   const std::string& path, const PlotAxes& axes) {
  const std::string text = render_svg_plot(series, axes);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace rested
