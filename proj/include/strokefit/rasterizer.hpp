#pragma once

#include <string>

#include "strokefit/geometry.hpp"
#include "strokefit/image.hpp"

namespace strokefit {

enum class Composition { over, color_replace };

struct RenderConfig {
  // Training progress. Distance exponent runs 1 -> 2 and effective width
  // 2w -> w as tau goes 0 -> 1.
  double anneal_tau = 1.0;
  Composition composition = Composition::color_replace;
  double intensity_clamp = 1.0 - 1e-6;
  int supersample = 1;  // k x k samples per pixel
  double background = 1.0;
};

void validate(const RenderConfig& config);

/// Unclamped stroke intensity exp(-d^(1+tau) / ((2-tau) w)^2).
double field_intensity(double distance, double width, double tau);

struct IntensityField {
  CanvasSpec canvas;
  Plane alpha;  // clamped to intensity_clamp
};

IntensityField stroke_field(const Stroke& stroke, const CanvasSpec& canvas,
                            const RenderConfig& config);

/// Front-to-back composite; strokes[0] is on top and the background is an
/// opaque final layer.
Image render(const StrokeSet& strokes, const CanvasSpec& canvas, const RenderConfig& config);

/// SVG document with one cubic path per stroke, in pixel coordinates.
std::string export_svg(const StrokeSet& strokes, const CanvasSpec& canvas);

}  // namespace strokefit
