#pragma once

#include <array>
#include <cmath>

#include "strokefit/geometry.hpp"

namespace testing {

inline strokefit::Stroke make_stroke(std::array<strokefit::Point, 4> points, double color = 0.0,
                                     double width = 0.05, int channels = 1) {
  strokefit::Stroke s;
  s.points = points;
  s.color = Eigen::VectorXd::Constant(channels, color);
  s.width = width;
  return s;
}

// A stroke degenerate to one point at distance d from the origin, the pixel
// center of a 1x1 canvas, with d chosen so the intensity there is alpha.
inline strokefit::Stroke stroke_with_alpha(double alpha, double color, double width = 0.1) {
  const double d = width * std::sqrt(-std::log(alpha));
  const strokefit::Point p(d, 0.0);
  return make_stroke({p, p, p, p}, color, width);
}

}  // namespace testing
