#include "interplab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace interplab {

namespace {

constexpr double kWidth = 840, kHeight = 540;
constexpr double kLeft = 70, kRight = 810, kTop = 40, kBottom = 480;

double tx(double v, bool log_scale, double lo, double hi) {
  if (log_scale) {
    v = std::log10(std::max(v, 1e-300));
    lo = std::log10(std::max(lo, 1e-300));
    hi = std::log10(std::max(hi, 1e-300));
  }
  if (hi <= lo) hi = lo + 1.0;
  return kLeft + (v - lo) / (hi - lo) * (kRight - kLeft);
}

double ty(double v, bool log_scale, double lo, double hi) {
  if (log_scale) {
    v = std::log10(std::max(v, 1e-300));
    lo = std::log10(std::max(lo, 1e-300));
    hi = std::log10(std::max(hi, 1e-300));
  }
  if (hi <= lo) hi = lo + 1.0;
  return kBottom - (v - lo) / (hi - lo) * (kBottom - kTop);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string render_line_plot(const SvgPlotSpec& spec) {
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
  for (const auto& s : spec.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.mean[i])) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      const double sd = i < s.std_dev.size() ? s.std_dev[i] : 0.0;
      y_lo = std::min(y_lo, s.mean[i] - sd);
      y_hi = std::max(y_hi, s.mean[i] + sd);
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0;
    x_hi = 1;
    y_lo = 0;
    y_hi = 1;
  }
  if (spec.log_y) y_lo = std::max(y_lo, 1e-6);
  const double y_pad = spec.log_y ? 1.3 : 0.05 * (y_hi - y_lo + 1e-12);
  if (spec.log_y) {
    y_lo /= y_pad;
    y_hi *= y_pad;
  } else {
    y_lo -= y_pad;
    y_hi += y_pad;
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << (kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << spec.title << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << (kRight - kLeft)
      << "\" height=\"" << (kBottom - kTop) << "\" fill=\"none\" stroke=\"black\"/>\n";

  // Axis ticks: 5 per axis, plain labels.
  for (int i = 0; i <= 5; ++i) {
    const double frac = i / 5.0;
    double xv;
    if (spec.log_x) {
      xv = std::pow(10.0, std::log10(std::max(x_lo, 1e-300)) +
                              frac * (std::log10(std::max(x_hi, 1e-300)) -
                                      std::log10(std::max(x_lo, 1e-300))));
    } else {
      xv = x_lo + frac * (x_hi - x_lo);
    }
    const double px = kLeft + frac * (kRight - kLeft);
    svg << "<line x1=\"" << px << "\" y1=\"" << kBottom << "\" x2=\"" << px << "\" y2=\""
        << (kBottom + 5) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << px << "\" y=\"" << (kBottom + 20)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(xv) << "</text>\n";
    double yv;
    if (spec.log_y) {
      yv = std::pow(10.0, std::log10(y_lo) + frac * (std::log10(y_hi) - std::log10(y_lo)));
    } else {
      yv = y_lo + frac * (y_hi - y_lo);
    }
    const double py = kBottom - frac * (kBottom - kTop);
    svg << "<line x1=\"" << (kLeft - 5) << "\" y1=\"" << py << "\" x2=\"" << kLeft << "\" y2=\""
        << py << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << (kLeft - 8) << "\" y=\"" << (py + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(yv) << "</text>\n";
  }
  svg << "<text x=\"" << (kWidth / 2) << "\" y=\"" << (kHeight - 12)
      << "\" text-anchor=\"middle\" font-size=\"13\">" << spec.x_label << "</text>\n";
  svg << "<text x=\"18\" y=\"" << (kHeight / 2)
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << (kHeight / 2) << ")\">" << spec.y_label << "</text>\n";

  if (spec.vline_x) {
    const double px = tx(*spec.vline_x, spec.log_x, x_lo, x_hi);
    svg << "<line x1=\"" << px << "\" y1=\"" << kTop << "\" x2=\"" << px << "\" y2=\"" << kBottom
        << "\" stroke=\"gray\" stroke-dasharray=\"5,4\"/>\n";
  }

  double legend_y = kTop + 16;
  for (const auto& s : spec.series) {
    std::ostringstream pts;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.mean[i])) continue;
      pts << tx(s.x[i], spec.log_x, x_lo, x_hi) << "," << ty(s.mean[i], spec.log_y, y_lo, y_hi)
          << " ";
    }
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\" points=\""
        << pts.str() << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size() && i < s.std_dev.size(); ++i) {
      if (!std::isfinite(s.mean[i]) || s.std_dev[i] <= 0.0) continue;
      const double px = tx(s.x[i], spec.log_x, x_lo, x_hi);
      const double y1 = ty(s.mean[i] - s.std_dev[i], spec.log_y, y_lo, y_hi);
      const double y2 = ty(s.mean[i] + s.std_dev[i], spec.log_y, y_lo, y_hi);
      svg << "<line x1=\"" << px << "\" y1=\"" << y1 << "\" x2=\"" << px << "\" y2=\"" << y2
          << "\" stroke=\"" << s.color << "\" stroke-width=\"1\"/>\n";
      svg << "<line x1=\"" << (px - 3) << "\" y1=\"" << y1 << "\" x2=\"" << (px + 3) << "\" y2=\""
          << y1 << "\" stroke=\"" << s.color << "\"/>\n";
      svg << "<line x1=\"" << (px - 3) << "\" y1=\"" << y2 << "\" x2=\"" << (px + 3) << "\" y2=\""
          << y2 << "\" stroke=\"" << s.color << "\"/>\n";
    }
    svg << "<line x1=\"" << (kRight - 150) << "\" y1=\"" << legend_y << "\" x2=\""
        << (kRight - 125) << "\" y2=\"" << legend_y << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << (kRight - 118) << "\" y=\"" << (legend_y + 4)
        << "\" font-size=\"12\">" << s.name << "</text>\n";
    legend_y += 18;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace interplab
