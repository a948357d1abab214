#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "perfplan/scaling.hpp"

namespace perfplan::io {

struct CurveSeries {
  std::string label;
  std::vector<CurvePoint<double>> points;
};

struct SvgOptions {
  int width{960};
  int height{600};
  bool log2_x{false};  // place x by log2(n) for power-of-two sweeps
  std::string title{};
  std::string x_label{"parallel units N"};
  std::string y_label{"speedup"};
};

/// Self-contained SVG line chart: inline styling only, fixed palette, axes
/// with ticks, a legend entry per series. Output depends only on the inputs.
void write_curve_svg(std::ostream& out, std::span<const CurveSeries> series,
                     const SvgOptions& options = {});

}  // namespace perfplan::io
