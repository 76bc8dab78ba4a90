#pragma once

#include <Eigen/Core>

#include <vector>

#include "strokefit/geometry.hpp"

namespace strokefit {

using Plane = Eigen::ArrayXXd;  // height x width

/// Multi-channel raster on a canvas. Rendered images hold values in [0,1];
/// the same type carries unconstrained per-pixel adjoints.
struct Image {
  CanvasSpec canvas;
  std::vector<Plane> planes;

  Image() = default;
  explicit Image(const CanvasSpec& c, double fill = 0.0)
      : canvas(c), planes(c.channels, Plane::Constant(c.height, c.width, fill)) {}

  int width() const { return canvas.width; }
  int height() const { return canvas.height; }
  int channels() const { return canvas.channels; }

  double& operator()(int row, int col, int ch) { return planes[ch](row, col); }
  double operator()(int row, int col, int ch) const { return planes[ch](row, col); }

  bool same_shape(const Image& other) const {
    return canvas.width == other.canvas.width && canvas.height == other.canvas.height &&
           canvas.channels == other.canvas.channels;
  }

  double max_abs_diff(const Image& other) const;

  bool operator==(const Image& other) const;
};

/// Throws unless every value is finite and within [0,1].
void validate_unit_range(const Image& image);

/// 0.299 R + 0.587 G + 0.114 B for three channels; the plane itself otherwise.
Plane luminance(const Image& image);

}  // namespace strokefit
