#include "strokefit/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace strokefit {

namespace {

double quantize(double v) { return std::ldexp(std::round(std::ldexp(v, 20)), -20); }

constexpr int kSmoothAttempts = 256;

void smooth_points(CounterRng& rng, const Point& anchor, double spread, double width,
                   Stroke& s) {
  for (int attempt = 0; attempt < kSmoothAttempts; ++attempt) {
    const double angle = rng.next_uniform(-std::numbers::pi, std::numbers::pi);
    const double length = rng.next_uniform(spread, 2.0 * spread);
    const Point dir(std::cos(angle), std::sin(angle));
    const Point normal(-dir.y(), dir.x());
    s.points[0] = anchor;
    s.points[1] = anchor + length / 3.0 * dir + rng.next_uniform(-0.3, 0.3) * length * normal;
    s.points[2] = anchor + 2.0 * length / 3.0 * dir + rng.next_uniform(-0.3, 0.3) * length * normal;
    s.points[3] = anchor + length * dir;
    if (min_curvature_radius(s) >= 2.0 * width) return;
  }
  s.points = {anchor, anchor + Point(spread / 3, 0), anchor + Point(2 * spread / 3, 0),
              anchor + Point(spread, 0)};
}

}  // namespace

double min_curvature_radius(const Stroke& stroke, int samples) {
  const auto& t = stroke.points;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= samples; ++k) {
    const double u = static_cast<double>(k) / samples, v = 1.0 - u;
    const Point d1 = 3.0 * (v * v * (t[1] - t[0]) + 2.0 * u * v * (t[2] - t[1]) + u * u * (t[3] - t[2]));
    const Point d2 = 6.0 * (v * (t[2] - 2.0 * t[1] + t[0]) + u * (t[3] - 2.0 * t[2] + t[1]));
    const double cross = std::abs(d1.x() * d2.y() - d1.y() * d2.x());
    const double speed = d1.norm();
    if (speed == 0.0) return 0.0;
    if (cross > 0.0) best = std::min(best, speed * speed * speed / cross);
  }
  return best;
}

StrokeSet random_scene(std::uint64_t seed, const SceneOptions& opts) {
  CounterRng rng(seed, /*stream=*/0x5ce7e);
  StrokeSet strokes;
  for (int i = 0; i < opts.strokes; ++i) {
    Stroke s;
    const Point anchor(rng.next_uniform(-opts.center_extent, opts.center_extent),
                       rng.next_uniform(-opts.center_extent, opts.center_extent));
    if (opts.smooth) {
      s.width = rng.next_uniform(opts.min_width, opts.max_width);
      smooth_points(rng, anchor, opts.spread, s.width, s);
    } else {
      s.points[0] = anchor;
      for (int k = 1; k < 4; ++k)
        s.points[k] = anchor + Point(rng.next_uniform(-opts.spread, opts.spread),
                                     rng.next_uniform(-opts.spread, opts.spread));
    }
    s.color.resize(opts.channels);
    for (int c = 0; c < opts.channels; ++c)
      s.color[c] = opts.random_color ? rng.next_uniform() : 0.0;
    if (!opts.smooth) s.width = rng.next_uniform(opts.min_width, opts.max_width);
    if (opts.dyadic) {
      for (auto& p : s.points) p = p.unaryExpr(&quantize);
      s.color = s.color.unaryExpr(&quantize);
      s.width = std::max(quantize(s.width), 0x1.0p-20);
    }
    strokes.push_back(std::move(s));
  }
  return strokes;
}

StrokeSet recovery_scene(double width) {
  auto make = [&](Point a, Point b, Point c, Point d) {
    Stroke s;
    s.points = {a, b, c, d};
    s.color = Eigen::VectorXd::Zero(1);
    s.width = width;
    return s;
  };
  return {
      make({-0.80, -0.55}, {-0.60, -0.95}, {-0.25, -0.15}, {-0.10, -0.55}),
      make({0.10, -0.75}, {0.35, -0.35}, {0.55, -0.95}, {0.80, -0.50}),
      make({-0.80, 0.30}, {-0.55, 0.80}, {-0.35, 0.00}, {-0.10, 0.55}),
      make({0.15, 0.75}, {0.30, 0.20}, {0.65, 0.25}, {0.80, 0.70}),
  };
}

StrokeSet perturb_points(const StrokeSet& strokes, double std, std::uint64_t seed) {
  const CounterRng rng(seed, /*stream=*/0x9e27);
  StrokeSet out = strokes;
  std::uint64_t counter = 0;
  for (auto& s : out)
    for (auto& p : s.points) {
      p.x() += std * rng.gaussian(counter++);
      p.y() += std * rng.gaussian(counter++);
    }
  return out;
}

}  // namespace strokefit
