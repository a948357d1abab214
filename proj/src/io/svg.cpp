#include "perfplan/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace perfplan::io {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string num(double value) {
  char buffer[48];
  std::snprintf(buffer, sizeof buffer, "%.2f", value);
  return buffer;
}

std::string tick_label(double value) {
  char buffer[48];
  std::snprintf(buffer, sizeof buffer, "%g", value);
  return buffer;
}

// 1-2-5 tick step covering the range with about `count` ticks.
double nice_step(double range, int count) {
  const double raw = range / std::max(count - 1, 1);
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  const double residual = raw / magnitude;
  if (residual <= 1.0) return magnitude;
  if (residual <= 2.0) return 2.0 * magnitude;
  if (residual <= 5.0) return 5.0 * magnitude;
  return 10.0 * magnitude;
}

}  // namespace

void write_curve_svg(std::ostream& out, std::span<const CurveSeries> series,
                     const SvgOptions& options) {
  if (series.empty()) throw std::domain_error("svg chart needs at least one series");
  for (const auto& s : series) {
    if (s.points.empty()) throw std::domain_error("svg series '" + s.label + "' is empty");
  }

  const double left = 70, right = 24, top = options.title.empty() ? 24 : 48, bottom = 56;
  const double plot_w = options.width - left - right;
  const double plot_h = options.height - top - bottom;

  const auto x_of = [&](double n) { return options.log2_x ? std::log2(n) : n; };

  double x_min = x_of(static_cast<double>(series[0].points[0].n_units));
  double x_max = x_min;
  double y_max = 0;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      const double x = x_of(static_cast<double>(p.n_units));
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_max = std::max(y_max, p.speedup);
    }
  }
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (y_max <= 0) y_max = 1;
  y_max *= 1.05;

  const auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  const auto py = [&](double y) { return top + plot_h - y / y_max * plot_h; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
      << "\" height=\"" << options.height << "\" viewBox=\"0 0 " << options.width << ' '
      << options.height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    out << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"16\">"
        << xml_escape(options.title) << "</text>\n";
  }

  // axes
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top + plot_h) << "\" x2=\""
      << num(left + plot_w) << "\" y2=\"" << num(top + plot_h)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left)
      << "\" y2=\"" << num(top + plot_h) << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  // x ticks: powers of two in log mode, 1-2-5 steps otherwise
  if (options.log2_x) {
    for (double e = std::ceil(x_min); e <= x_max + 1e-9; e += 1.0) {
      const double x = px(e);
      out << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(x)
          << "\" y2=\"" << num(top + plot_h + 5) << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << num(x) << "\" y=\"" << num(top + plot_h + 20)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
          << tick_label(std::exp2(e)) << "</text>\n";
    }
  } else {
    const double step = nice_step(x_max - x_min, 7);
    for (double v = std::ceil(x_min / step) * step; v <= x_max + 1e-9; v += step) {
      const double x = px(v);
      out << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + plot_h) << "\" x2=\"" << num(x)
          << "\" y2=\"" << num(top + plot_h + 5) << "\" stroke=\"black\"/>\n";
      out << "<text x=\"" << num(x) << "\" y=\"" << num(top + plot_h + 20)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
          << tick_label(v) << "</text>\n";
    }
  }

  const double y_step = nice_step(y_max, 6);
  for (double v = 0; v <= y_max + 1e-9; v += y_step) {
    const double y = py(v);
    out << "<line x1=\"" << num(left) << "\" y1=\"" << num(y) << "\" x2=\""
        << num(left + plot_w) << "\" y2=\"" << num(y)
        << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
    out << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick_label(v) << "</text>\n";
  }

  // axis labels
  out << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(options.height - 12)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << xml_escape(options.x_label) << (options.log2_x ? " (log scale)" : "")
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << num(top + plot_h / 2)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 16 "
      << num(top + plot_h / 2) << ")\">" << xml_escape(options.y_label) << "</text>\n";

  // one polyline per series, markers when a series is sparse
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
    for (const auto& p : series[i].points) {
      out << num(px(x_of(static_cast<double>(p.n_units)))) << ',' << num(py(p.speedup)) << ' ';
    }
    out << "\"/>\n";
    if (series[i].points.size() <= 24) {
      for (const auto& p : series[i].points) {
        out << "<circle cx=\"" << num(px(x_of(static_cast<double>(p.n_units)))) << "\" cy=\""
            << num(py(p.speedup)) << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
      }
    }
  }

  // legend
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = top + 14 + 18 * static_cast<double>(i);
    out << "<line x1=\"" << num(left + 10) << "\" y1=\"" << num(y) << "\" x2=\""
        << num(left + 34) << "\" y2=\"" << num(y) << "\" stroke=\""
        << kPalette[i % std::size(kPalette)] << "\" stroke-width=\"1.8\"/>\n";
    out << "<text x=\"" << num(left + 40) << "\" y=\"" << num(y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << xml_escape(series[i].label.empty() ? "series " + std::to_string(i + 1)
                                              : series[i].label)
        << "</text>\n";
  }

  out << "</svg>\n";
}

}  // namespace perfplan::io
