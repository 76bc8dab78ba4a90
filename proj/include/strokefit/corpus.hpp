#pragma once

#include <cstdint>

#include "strokefit/geometry.hpp"
#include "strokefit/random.hpp"

namespace strokefit {

/// Options for seeded random stroke sets used by property checks.
struct SceneOptions {
  int strokes = 3;
  int channels = 1;
  double center_extent = 0.6;  // t1 uniform in [-extent, extent]^2
  double spread = 0.5;         // other control points within t1 +- spread
  double min_width = 0.05;
  double max_width = 0.15;
  bool random_color = true;    // else black
  // Round coordinates to multiples of 2^-20 so whole-pixel translations of
  // power-of-two canvases are exact in floating point.
  bool dyadic = false;
  // Gently curved strokes: t2, t3 near the chord t1 -> t4 (chord length up
  // to 2 * spread) and curvature radius at least 2 * width everywhere.
  bool smooth = false;
};

/// Smallest radius of curvature over `samples` + 1 uniform parameter values.
double min_curvature_radius(const Stroke& stroke, int samples = 512);

StrokeSet random_scene(std::uint64_t seed, const SceneOptions& opts);

/// Four curved, separated black strokes inside [-0.8, 0.8]^2, each drawn
/// left to right.
StrokeSet recovery_scene(double width = 0.06);

/// Copy of `strokes` with every control point coordinate moved by N(0, std).
StrokeSet perturb_points(const StrokeSet& strokes, double std, std::uint64_t seed);

}  // namespace strokefit
