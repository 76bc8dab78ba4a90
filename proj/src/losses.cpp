#include "strokefit/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "strokefit/equivariance.hpp"
#include "strokefit/random.hpp"

namespace strokefit {

namespace {

void check_same_shape(const Image& a, const Image& b) {
  if (!a.same_shape(b))
    throw ValidationError("image dimensions differ: " + std::to_string(a.width()) + "x" +
                          std::to_string(a.height()) + "x" + std::to_string(a.channels()) +
                          " vs " + std::to_string(b.width()) + "x" + std::to_string(b.height()) +
                          "x" + std::to_string(b.channels()));
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double sorted_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

}  // namespace

double l1_image_loss(const Image& a, const Image& b) {
  check_same_shape(a, b);
  std::vector<double> terms;
  terms.reserve(static_cast<size_t>(a.canvas.pixel_count()) * a.channels());
  for (int ch = 0; ch < a.channels(); ++ch) {
    const Plane d = (a.planes[ch] - b.planes[ch]).abs();
    terms.insert(terms.end(), d.data(), d.data() + d.size());
  }
  return sorted_sum(terms) / static_cast<double>(terms.size());
}

Image l1_image_grad(const Image& sketch, const Image& target) {
  check_same_shape(sketch, target);
  Image g(sketch.canvas);
  const double scale = 1.0 / (static_cast<double>(sketch.canvas.pixel_count()) * sketch.channels());
  for (int ch = 0; ch < sketch.channels(); ++ch)
    g.planes[ch] = (sketch.planes[ch] - target.planes[ch]).unaryExpr(&sign) * scale;
  return g;
}

double boundary_penalty(const StrokeSet& strokes) {
  double total = 0.0;
  for (const auto& s : strokes)
    for (const auto& t : s.points) total += std::max(0.0, t.lpNorm<Eigen::Infinity>() - 1.0);
  return total;
}

double align_penalty(const StrokeSet& strokes) {
  double total = 0.0;
  for (const auto& s : strokes) total += std::max(0.0, s.points[0].x() - s.points[3].x());
  return total;
}

StrokeGrads penalty_grad(const StrokeSet& strokes) {
  StrokeGrads grads;
  for (const auto& s : strokes) {
    StrokeGrad g = StrokeGrad::zero(s.channels());
    for (int k = 0; k < 4; ++k) {
      const Point& t = s.points[k];
      if (t.lpNorm<Eigen::Infinity>() <= 1.0) continue;
      const int axis = std::abs(t.x()) >= std::abs(t.y()) ? 0 : 1;
      g.d_points[k][axis] += sign(t[axis]);
    }
    if (s.points[0].x() > s.points[3].x()) {
      g.d_points[0].x() += 1.0;
      g.d_points[3].x() -= 1.0;
    }
    grads.push_back(std::move(g));
  }
  return grads;
}

double stroke_l1(const Stroke& a, const Stroke& b, bool include_width) {
  if (a.channels() != b.channels()) throw ValidationError("stroke color channels differ");
  double total = 0.0;
  for (int k = 0; k < 4; ++k) total += (a.points[k] - b.points[k]).cwiseAbs().sum();
  total += (a.color - b.color).cwiseAbs().sum();
  if (include_width) total += std::abs(a.width - b.width);
  return total;
}

GuidanceResult guidance_loss(const StrokeSet& pred, const StrokeSet& gt, bool include_width) {
  if (pred.size() != gt.size())
    throw ValidationError("stroke sets differ in size: " + std::to_string(pred.size()) + " vs " +
                          std::to_string(gt.size()));
  const auto n = static_cast<Eigen::Index>(gt.size());
  CostMatrix<double> cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = stroke_l1(gt[i], pred[j], include_width);
  Assignment assignment = hungarian(cost);
  std::vector<double> matched(gt.size());
  for (Eigen::Index i = 0; i < n; ++i) matched[i] = cost(i, assignment.permutation[i]);
  const double loss = sorted_sum(matched);
  return {loss, std::move(assignment)};
}

void validate(const MetricSpec& metric) {
  if (metric.augment_samples < 0) throw ValidationError("augment_samples must be >= 0");
  const auto& r = metric.ranges;
  if (!(r.max_rotation_deg >= 0.0) || !(r.max_translation >= 0.0))
    throw ValidationError("augmentation ranges must be nonnegative");
  if (!(r.min_scale > 0.0 && r.min_scale <= r.max_scale))
    throw ValidationError("augmentation scale range must satisfy 0 < min <= max");
  if (metric.kind == MetricKind::external && !metric.external)
    throw ValidationError("external metric kind requires a metric callable");
}

double base_metric(const MetricSpec& metric, const Image& target, const Image& sketch,
                   Image* sketch_grad) {
  if (metric.kind == MetricKind::external) {
    if (!metric.external) throw ValidationError("external metric kind requires a metric callable");
    return metric.external(target, sketch, sketch_grad);
  }
  if (sketch_grad) *sketch_grad = l1_image_grad(sketch, target);
  return l1_image_loss(target, sketch);
}

std::vector<AffineMap> sample_augmentations(const MetricSpec& metric, const CanvasSpec& canvas,
                                            std::uint64_t seed) {
  validate(metric);
  const auto& r = metric.ranges;
  const CounterRng rng(seed, /*stream=*/0xa11ce);
  std::vector<AffineMap> maps;
  for (int k = 0; k < metric.augment_samples; ++k) {
    const std::uint64_t base = 4 * static_cast<std::uint64_t>(k);
    const double max_rad = r.max_rotation_deg * std::numbers::pi / 180.0;
    const double theta = rng.uniform(base, -max_rad, max_rad);
    const double scale = rng.uniform(base + 1, r.min_scale, r.max_scale);
    double tx = rng.uniform(base + 2, -r.max_translation, r.max_translation);
    double ty = rng.uniform(base + 3, -r.max_translation, r.max_translation);
    if (r.snap_translation) {
      tx = std::round(tx * canvas.width / 2.0) * 2.0 / canvas.width;
      ty = std::round(ty * canvas.height / 2.0) * 2.0 / canvas.height;
    }
    AffineMap m;
    if (theta != 0.0 || scale != 1.0) m = AffineMap::similarity(scale, theta, 0.0, 0.0);
    m.translation = {tx, ty};
    maps.push_back(m);
  }
  return maps;
}

double augmented_loss(const MetricSpec& metric, const Image& image, const StrokeSet& strokes,
                      const CanvasSpec& canvas, const RenderConfig& config,
                      std::uint64_t seed) {
  validate(metric);
  if (metric.augment_samples == 0)
    return base_metric(metric, image, render(strokes, canvas, config), nullptr);
  const auto maps = sample_augmentations(metric, canvas, seed);
  double total = 0.0;
  for (const auto& g : maps) {
    const Image target =
        transform_image(image, {g, Interpolation::bilinear, natural_boundary(canvas)});
    total += base_metric(metric, target, render(apply_affine_strokes(g, strokes), canvas, config),
                         nullptr);
  }
  return total / static_cast<double>(maps.size());
}

LossWithGrad augmented_loss_with_grad(const MetricSpec& metric, const Image& image,
                                      const StrokeSet& strokes, const CanvasSpec& canvas,
                                      const RenderConfig& config, std::uint64_t seed) {
  validate(metric);
  if (!image.same_shape(Image(canvas)))
    throw ValidationError("target image does not match the canvas");
  const bool augment = metric.augment_samples > 0;
  const auto maps = augment ? sample_augmentations(metric, canvas, seed)
                            : std::vector<AffineMap>{AffineMap::identity()};
  const double inv_count = 1.0 / static_cast<double>(maps.size());

  LossWithGrad out{0.0, {}};
  for (const auto& s : strokes) out.grads.push_back(StrokeGrad::zero(s.channels()));

  for (const auto& g : maps) {
    const Image target =
        augment ? transform_image(image, {g, Interpolation::bilinear, natural_boundary(canvas)})
                : image;
    const StrokeSet moved = augment ? apply_affine_strokes(g, strokes) : strokes;
    RenderWithGrad rg;
    double value;
    if (metric.kind == MetricKind::l1) {
      const double scale = 1.0 / (static_cast<double>(canvas.pixel_count()) * canvas.channels);
      rg = render_with_adjoint_fn(moved, canvas, config,
                                  [&](int row, int col, const double* pixel, double* adj) {
                                    for (int ch = 0; ch < canvas.channels; ++ch)
                                      adj[ch] = sign(pixel[ch] - target(row, col, ch)) * scale;
                                  });
      value = l1_image_loss(target, rg.image);
    } else {
      const Image sketch = render(moved, canvas, config);
      Image adjoint(canvas);
      value = base_metric(metric, target, sketch, &adjoint);
      rg = render_with_grad(moved, canvas, config, adjoint);
    }
    out.loss += value * inv_count;
    // Pull gradients back through x -> A x + t and w -> f w.
    const double wf = width_factor(g);
    for (size_t i = 0; i < strokes.size(); ++i) {
      for (int k = 0; k < 4; ++k)
        out.grads[i].d_points[k] += inv_count * (g.linear.transpose() * rg.grads[i].d_points[k]);
      out.grads[i].d_color += inv_count * rg.grads[i].d_color;
      out.grads[i].d_width += inv_count * wf * rg.grads[i].d_width;
    }
  }
  return out;
}

}  // namespace strokefit
