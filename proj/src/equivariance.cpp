#include "strokefit/equivariance.hpp"

#include <cmath>

#include "strokefit/losses.hpp"
#include "strokefit/parallel.hpp"

namespace strokefit {

namespace {

constexpr double kSnap = 1e-9;

int wrap_index(long i, int n) {
  const long m = i % n;
  return static_cast<int>(m < 0 ? m + n : m);
}

int resolve(long i, int n, Boundary boundary) {
  if (boundary == Boundary::wrap) return wrap_index(i, n);
  return static_cast<int>(std::clamp<long>(i, 0, n - 1));
}

double snap(double x) {
  const double r = std::round(x);
  return std::abs(x - r) < kSnap ? r : x;
}

}  // namespace

Boundary natural_boundary(const CanvasSpec& canvas) {
  return canvas.topology == Topology::toroidal ? Boundary::wrap : Boundary::clamp;
}

Image transform_image(const Image& image, const ImageTransformSpec& spec) {
  const CanvasSpec& canvas = image.canvas;
  if (spec.boundary == Boundary::wrap && canvas.topology != Topology::toroidal)
    throw ValidationError("wrap boundary requires a toroidal canvas");
  const AffineMap inv = spec.map.inverse();
  Image out(canvas);
  parallel_for(canvas.height, [&](int row) {
    for (int col = 0; col < canvas.width; ++col) {
      const Eigen::Vector2d src = canvas.to_pixel(inv(canvas.pixel_center(row, col)));
      const double x = snap(src.x());
      const double y = snap(src.y());
      if (spec.interpolation == Interpolation::nearest) {
        const int c = resolve(std::lround(x), canvas.width, spec.boundary);
        const int r = resolve(std::lround(y), canvas.height, spec.boundary);
        for (int ch = 0; ch < canvas.channels; ++ch) out(row, col, ch) = image(r, c, ch);
        continue;
      }
      const double fx0 = std::floor(x);
      const double fy0 = std::floor(y);
      const double fx = x - fx0;
      const double fy = y - fy0;
      const long x0 = static_cast<long>(fx0);
      const long y0 = static_cast<long>(fy0);
      const int c0 = resolve(x0, canvas.width, spec.boundary);
      const int c1 = resolve(x0 + 1, canvas.width, spec.boundary);
      const int r0 = resolve(y0, canvas.height, spec.boundary);
      const int r1 = resolve(y0 + 1, canvas.height, spec.boundary);
      for (int ch = 0; ch < canvas.channels; ++ch) {
        const double top = (1.0 - fx) * image(r0, c0, ch) + fx * image(r0, c1, ch);
        const double bottom = (1.0 - fx) * image(r1, c0, ch) + fx * image(r1, c1, ch);
        out(row, col, ch) = (1.0 - fy) * top + fy * bottom;
      }
    }
  });
  return out;
}

double check_render_equivariance(const StrokeSet& strokes, const AffineMap& map,
                                 const CanvasSpec& canvas, const RenderConfig& config) {
  const Image moved = render(apply_affine_strokes(map, strokes), canvas, config);
  const Image base = render(strokes, canvas, config);
  const Image resampled =
      transform_image(base, {map, Interpolation::bilinear, natural_boundary(canvas)});
  return moved.max_abs_diff(resampled);
}

std::pair<double, double> check_loss_condition(const MetricSpec& metric, const Image& image,
                                               const StrokeSet& strokes, const AffineMap& map,
                                               const CanvasSpec& canvas,
                                               const RenderConfig& config) {
  const Image moved_image =
      transform_image(image, {map, Interpolation::bilinear, natural_boundary(canvas)});
  const Image moved_sketch = render(apply_affine_strokes(map, strokes), canvas, config);
  const Image sketch = render(strokes, canvas, config);
  return {base_metric(metric, moved_image, moved_sketch, nullptr),
          base_metric(metric, image, sketch, nullptr)};
}

}  // namespace strokefit
