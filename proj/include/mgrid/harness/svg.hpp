#pragma once

#include <string>
#include <vector>

namespace mgrid::harness {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

/// Renders a line chart as a standalone SVG document. Output depends only on
/// the input values, so identical data gives identical bytes.
std::string render_svg(const LinePlot& plot, int width = 800, int height = 450);

}  // namespace mgrid::harness
