#pragma once

#include <array>
#include <functional>
#include <vector>

#include "strokefit/image.hpp"
#include "strokefit/rasterizer.hpp"

namespace strokefit {

struct StrokeGrad {
  std::array<Eigen::Vector2d, 4> d_points;
  Eigen::VectorXd d_color;
  double d_width = 0.0;

  static StrokeGrad zero(int channels);
  StrokeGrad& operator+=(const StrokeGrad& other);
};

using StrokeGrads = std::vector<StrokeGrad>;

struct RenderWithGrad {
  Image image;
  StrokeGrads grads;
};

/// Renders and back-propagates sum_u adjoint(u) . pixel(u) to every stroke
/// parameter. The curve minimizer s* is held fixed.
RenderWithGrad render_with_grad(const StrokeSet& strokes, const CanvasSpec& canvas,
                                const RenderConfig& config, const Image& pixel_adjoint);

/// Computes the adjoint of one pixel from its rendered channel values.
using PixelAdjointFn =
    std::function<void(int row, int col, const double* pixel, double* adjoint)>;

/// Single-pass variant for losses whose adjoint at a pixel depends only on
/// that pixel's rendered value.
RenderWithGrad render_with_adjoint_fn(const StrokeSet& strokes, const CanvasSpec& canvas,
                                      const RenderConfig& config, const PixelAdjointFn& adjoint);

/// Central differences, two renders per scalar parameter. Colors within h of
/// 0 or 1 use a one-sided difference that stays inside [0,1].
StrokeGrads finite_diff_grad(const StrokeSet& strokes, const CanvasSpec& canvas,
                             const RenderConfig& config, const Image& pixel_adjoint, double h);

/// 1 where the curve distance is not smooth in the stroke parameters at some
/// sample point of the pixel, else 0: the point lies within `radius` of a
/// curve, or two distinct closest-point branches (including torus copies)
/// are within `radius` of each other in distance.
Plane singular_pixel_mask(const StrokeSet& strokes, const CanvasSpec& canvas,
                          const RenderConfig& config, double radius);

}  // namespace strokefit
