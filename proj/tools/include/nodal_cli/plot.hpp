#pragma once

#include <string>
#include <vector>

// Minimal static SVG charts (scatter with error bars, polylines).
namespace nodal::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  // optional half-widths, same length as y
  bool line = false;        // polyline instead of markers
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Throws std::runtime_error when the chart has no finite points.
std::string render_svg(const Chart& chart);

}  // namespace nodal::cli
