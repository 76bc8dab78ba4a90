#pragma once

#include <string>
#include <utility>
#include <vector>

#include "strokefit/geometry.hpp"
#include "strokefit/image.hpp"
#include "strokefit/rasterizer.hpp"

namespace strokefit {

struct MetricSpec;

enum class Interpolation { nearest, bilinear };
enum class Boundary { wrap, clamp };

struct ImageTransformSpec {
  AffineMap map;
  Interpolation interpolation = Interpolation::bilinear;
  Boundary boundary = Boundary::clamp;
};

/// out(u) = in(map^-1 u). Sample positions within 1e-9 pixels of a pixel
/// center are snapped to it, so maps that permute the pixel grid (integer
/// shifts, quarter turns of a square canvas) move values exactly.
Image transform_image(const Image& image, const ImageTransformSpec& spec);

/// Boundary that matches the canvas topology.
Boundary natural_boundary(const CanvasSpec& canvas);

/// Max-abs difference between render(map . strokes) and the transformed render.
double check_render_equivariance(const StrokeSet& strokes, const AffineMap& map,
                                 const CanvasSpec& canvas, const RenderConfig& config);

/// (L(g I, g S), L(I, S)) with g S the render of the transformed strokes.
std::pair<double, double> check_loss_condition(const MetricSpec& metric, const Image& image,
                                               const StrokeSet& strokes, const AffineMap& map,
                                               const CanvasSpec& canvas,
                                               const RenderConfig& config);

}  // namespace strokefit
