// Renders a matrix as an SVG grid of rects for visual inspection of weight
// matrices and spectra. One rect per cell, nothing else; values are mapped
// through a fixed blue-white-red ramp (all-equal input maps to the middle).
#pragma once

#include <algorithm>
#include <cstdio>
#include <string>

#include "dsg/matrix.hpp"

namespace dsg {

namespace detail {

inline std::string ramp_color(double t) {  // t in [0, 1]
  // 0 -> deep blue, 0.5 -> white, 1 -> deep red.
  auto lerp = [](double a, double b, double u) { return a + (b - a) * u; };
  double r, g, b;
  if (t < 0.5) {
    double u = t / 0.5;
    r = lerp(33, 247, u);
    g = lerp(68, 247, u);
    b = lerp(160, 247, u);
  } else {
    double u = (t - 0.5) / 0.5;
    r = lerp(247, 178, u);
    g = lerp(247, 24, u);
    b = lerp(247, 43, u);
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(r + 0.5),
                static_cast<int>(g + 0.5), static_cast<int>(b + 0.5));
  return buf;
}

}  // namespace detail

inline std::string svg_heatmap(const DenseMatrix& m, int cell_px = 8) {
  double lo = m.data()[0], hi = m.data()[0];
  for (double v : m.data()) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double span = hi - lo;
  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(m.cols() * cell_px) + "\" height=\"" +
         std::to_string(m.rows() * cell_px) + "\">\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double t = span > 0 ? (m(i, j) - lo) / span : 0.5;
      svg += "<rect x=\"" + std::to_string(j * cell_px) + "\" y=\"" +
             std::to_string(i * cell_px) + "\" width=\"" +
             std::to_string(cell_px) + "\" height=\"" +
             std::to_string(cell_px) + "\" fill=\"" +
             detail::ramp_color(t) + "\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace dsg
