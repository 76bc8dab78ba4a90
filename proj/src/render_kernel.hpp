#pragma once

// Per-sample forward/backward compositing shared by render and
// render_with_grad.

#include <vector>

#include "strokefit/bezier.hpp"
#include "strokefit/gradients.hpp"
#include "strokefit/rasterizer.hpp"

namespace strokefit::detail {

// Intensities below exp(-kCullExponent) are treated as exactly zero.
inline constexpr double kCullExponent = 60.0;

struct Anneal {
  double half_exponent;  // (1 + tau) / 2, applied to squared distance
  double width_scale;    // 2 - tau
};

inline Anneal make_anneal(double tau) { return {(1.0 + tau) / 2.0, 2.0 - tau}; }

struct StrokeSample {
  double alpha = 0.0;
  bool clamped = false;
  bool active = false;  // false: culled, alpha exactly zero
  double dist2 = 0.0;
  double s = 0.0;
  Point foot = Point::Zero();  // C(s*) - u
};

struct PixelWorkspace {
  std::vector<StrokeSample> samples;
  std::vector<double> trans;   // n x C transmittance before each stroke
  std::vector<double> behind;  // n x C composite of everything below each stroke
  std::vector<double> out;     // C, clamped
  std::vector<double> raw;     // C, before clamping
  std::vector<double> d_alpha; // n
};

StrokeSample sample_stroke(const Stroke& stroke, const Point& u, Topology topology,
                           const Anneal& anneal, double clamp);

// Composites strokes at sample point u into ws.out.
void forward_sample(const StrokeSet& strokes, const Point& u, const CanvasSpec& canvas,
                    const RenderConfig& config, PixelWorkspace& ws);

// After forward_sample on the same workspace: accumulates
// weight * d(sum_c adjoint[c] out[c]) / d(params) into grads.
void backward_sample(const StrokeSet& strokes, const CanvasSpec& canvas,
                     const RenderConfig& config, PixelWorkspace& ws, const double* adjoint,
                     double weight, StrokeGrads& grads);

// Sample offsets within a pixel, canvas units.
std::vector<Point> subsample_offsets(const CanvasSpec& canvas, int k);

Image render_unchecked(const StrokeSet& strokes, const CanvasSpec& canvas,
                       const RenderConfig& config);

}  // namespace strokefit::detail
