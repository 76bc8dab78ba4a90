#include "strokefit/rasterizer.hpp"

#include <cmath>
#include <limits>

#include "render_kernel.hpp"
#include "strokefit/parallel.hpp"

namespace strokefit {

namespace detail {

namespace {

// d^(2 h) given d^2.
double distance_power(double dist2, double half_exponent) {
  return half_exponent == 1.0 ? dist2 : std::pow(dist2, half_exponent);
}

}  // namespace

StrokeSample sample_stroke(const Stroke& stroke, const Point& u, Topology topology,
                           const Anneal& anneal, double clamp) {
  const double w_eff = anneal.width_scale * stroke.width;
  const double w2 = w_eff * w_eff;
  const auto rel = relative_points(ControlPoints<double>(stroke.points), u, topology);
  const int reach = topology == Topology::toroidal ? 1 : 0;

  StrokeSample best;
  best.dist2 = std::numeric_limits<double>::infinity();
  for (int oy = -reach; oy <= reach; ++oy) {
    for (int ox = -reach; ox <= reach; ++ox) {
      const Point offset(ox * kTorusPeriod, oy * kTorusPeriod);
      ControlPoints<double> copy;
      Point lo = Point::Constant(std::numeric_limits<double>::infinity());
      Point hi = -lo;
      for (int k = 0; k < 4; ++k) {
        copy[k] = rel[k] + offset;
        lo = lo.cwiseMin(copy[k]);
        hi = hi.cwiseMax(copy[k]);
      }
      // The curve lies in the hull of its control points, so the distance to
      // their bounding box bounds the curve distance from below.
      const double dx = std::max(0.0, std::max(lo.x(), -hi.x()));
      const double dy = std::max(0.0, std::max(lo.y(), -hi.y()));
      const double bound2 = dx * dx + dy * dy;
      if (bound2 >= best.dist2) continue;
      if (distance_power(bound2, anneal.half_exponent) / w2 > kCullExponent) continue;
      const auto proj = project_origin(copy);
      if (proj.dist2 < best.dist2) {
        best.active = true;
        best.dist2 = proj.dist2;
        best.s = proj.s;
        best.foot = proj.foot;
      }
    }
  }
  if (!best.active) {
    best.dist2 = 0.0;
    return best;
  }
  best.alpha = std::exp(-distance_power(best.dist2, anneal.half_exponent) / w2);
  if (best.alpha > clamp) {
    best.alpha = clamp;
    best.clamped = true;
  }
  return best;
}

void forward_sample(const StrokeSet& strokes, const Point& u, const CanvasSpec& canvas,
                    const RenderConfig& config, PixelWorkspace& ws) {
  const int n = static_cast<int>(strokes.size());
  const int nc = canvas.channels;
  const Anneal anneal = make_anneal(config.anneal_tau);
  const bool replace = config.composition == Composition::color_replace;

  ws.samples.resize(n);
  ws.trans.resize(static_cast<size_t>(n) * nc);
  ws.out.resize(nc);
  ws.raw.resize(nc);
  for (int i = 0; i < n; ++i)
    ws.samples[i] =
        sample_stroke(strokes[i], u, canvas.topology, anneal, config.intensity_clamp);

  for (int ch = 0; ch < nc; ++ch) {
    double log_trans = 0.0;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = ws.samples[i].alpha;
      const double c = strokes[i].color[ch];
      const double t = std::exp(log_trans);
      ws.trans[i * nc + ch] = t;
      const double value = a * c;
      acc += value * t;
      log_trans += std::log1p(-(replace ? a : value));
    }
    acc += config.background * std::exp(log_trans);
    ws.raw[ch] = acc;
    ws.out[ch] = std::clamp(acc, 0.0, 1.0);
  }
}

void backward_sample(const StrokeSet& strokes, const CanvasSpec& canvas,
                     const RenderConfig& config, PixelWorkspace& ws, const double* adjoint,
                     double weight, StrokeGrads& grads) {
  const int n = static_cast<int>(strokes.size());
  const int nc = canvas.channels;
  const Anneal anneal = make_anneal(config.anneal_tau);
  const bool replace = config.composition == Composition::color_replace;

  constexpr double kClampSlack = 1e-9;
  ws.d_alpha.assign(n, 0.0);
  for (int ch = 0; ch < nc; ++ch) {
    const double g = adjoint[ch] * weight;
    if (g == 0.0 || ws.raw[ch] < -kClampSlack || ws.raw[ch] > 1.0 + kClampSlack) continue;
    double below = config.background;
    for (int i = n - 1; i >= 0; --i) {
      const double a = ws.samples[i].alpha;
      const double c = strokes[i].color[ch];
      const double gt = g * ws.trans[i * nc + ch];
      if (replace) {
        ws.d_alpha[i] += gt * (c - below);
        grads[i].d_color[ch] += gt * a;
        below = a * c + (1.0 - a) * below;
      } else {
        ws.d_alpha[i] += gt * c * (1.0 - below);
        grads[i].d_color[ch] += gt * a * (1.0 - below);
        below = a * c + (1.0 - a * c) * below;
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    const StrokeSample& sm = ws.samples[i];
    const double da = ws.d_alpha[i];
    if (!sm.active || sm.clamped || da == 0.0) continue;
    const double w_eff = anneal.width_scale * strokes[i].width;
    const double w2 = w_eff * w_eff;
    const double dpow = distance_power(sm.dist2, anneal.half_exponent);
    StrokeGrad& gr = grads[i];
    if (sm.dist2 > 0.0) {
      const double radial = anneal.half_exponent == 1.0
                                ? 1.0
                                : std::pow(sm.dist2, anneal.half_exponent - 1.0);
      const double coef = -da * sm.alpha / w2 * 2.0 * anneal.half_exponent * radial;
      const auto b = bernstein(sm.s);
      for (int k = 0; k < 4; ++k) gr.d_points[k] += (coef * b[k]) * sm.foot;
    }
    gr.d_width += da * 2.0 * sm.alpha * dpow * anneal.width_scale / (w_eff * w2);
  }
}

std::vector<Point> subsample_offsets(const CanvasSpec& canvas, int k) {
  std::vector<Point> offsets;
  offsets.reserve(static_cast<size_t>(k) * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b)
      offsets.emplace_back(((b + 0.5) / k - 0.5) * 2.0 / canvas.width,
                           ((a + 0.5) / k - 0.5) * 2.0 / canvas.height);
  return offsets;
}

Image render_unchecked(const StrokeSet& strokes, const CanvasSpec& canvas,
                       const RenderConfig& config) {
  Image out(canvas);
  const auto offsets = subsample_offsets(canvas, config.supersample);
  const double weight = 1.0 / static_cast<double>(offsets.size());
  parallel_for(canvas.height, [&](int row) {
    PixelWorkspace ws;
    std::vector<double> sum(canvas.channels);
    for (int col = 0; col < canvas.width; ++col) {
      const Point center = canvas.pixel_center(row, col);
      if (offsets.size() == 1) {
        forward_sample(strokes, center, canvas, config, ws);
        for (int ch = 0; ch < canvas.channels; ++ch) out(row, col, ch) = ws.out[ch];
        continue;
      }
      std::fill(sum.begin(), sum.end(), 0.0);
      for (const auto& off : offsets) {
        forward_sample(strokes, center + off, canvas, config, ws);
        for (int ch = 0; ch < canvas.channels; ++ch) sum[ch] += ws.out[ch];
      }
      for (int ch = 0; ch < canvas.channels; ++ch) out(row, col, ch) = sum[ch] * weight;
    }
  });
  return out;
}

}  // namespace detail

void validate(const RenderConfig& config) {
  if (!(config.anneal_tau >= 0.0 && config.anneal_tau <= 1.0))
    throw ValidationError("anneal_tau must lie in [0,1]");
  if (!(config.intensity_clamp > 0.0 && config.intensity_clamp < 1.0))
    throw ValidationError("intensity_clamp must lie in (0,1)");
  if (config.supersample < 1) throw ValidationError("supersample must be >= 1");
  if (!(config.background >= 0.0 && config.background <= 1.0))
    throw ValidationError("background must lie in [0,1]");
}

double field_intensity(double distance, double width, double tau) {
  const double w_eff = (2.0 - tau) * width;
  return std::exp(-std::pow(distance, 1.0 + tau) / (w_eff * w_eff));
}

IntensityField stroke_field(const Stroke& stroke, const CanvasSpec& canvas,
                            const RenderConfig& config) {
  validate(canvas);
  validate(config);
  validate(stroke);
  IntensityField field{canvas, Plane::Zero(canvas.height, canvas.width)};
  const auto anneal = detail::make_anneal(config.anneal_tau);
  const auto offsets = detail::subsample_offsets(canvas, config.supersample);
  parallel_for(canvas.height, [&](int row) {
    for (int col = 0; col < canvas.width; ++col) {
      double sum = 0.0;
      for (const auto& off : offsets)
        sum += detail::sample_stroke(stroke, canvas.pixel_center(row, col) + off,
                                     canvas.topology, anneal, config.intensity_clamp)
                   .alpha;
      field.alpha(row, col) = sum / static_cast<double>(offsets.size());
    }
  });
  return field;
}

Image render(const StrokeSet& strokes, const CanvasSpec& canvas, const RenderConfig& config) {
  validate(canvas);
  validate(config);
  validate(strokes, canvas.channels);
  return detail::render_unchecked(strokes, canvas, config);
}

}  // namespace strokefit
