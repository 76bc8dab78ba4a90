#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <vector>

#include "strokefit/geometry.hpp"

namespace strokefit {

template <typename Scalar>
using ControlPoints = std::array<Vec2<Scalar>, 4>;

/// Cubic Bernstein basis at s.
template <typename Scalar>
std::array<Scalar, 4> bernstein(Scalar s) {
  const Scalar r = Scalar(1) - s;
  return {r * r * r, Scalar(3) * s * r * r, Scalar(3) * s * s * r, s * s * s};
}

template <typename Scalar>
Vec2<Scalar> bezier_eval(const ControlPoints<Scalar>& p, Scalar s) {
  const auto b = bernstein(s);
  return b[0] * p[0] + b[1] * p[1] + b[2] * p[2] + b[3] * p[3];
}

/// Curve point at s in [0,1]; throws ValidationError outside that range.
Point bezier_point(const Stroke& stroke, double s);

/// Power-basis form c0 + s c1 + s^2 c2 + s^3 c3 of a cubic, for repeated
/// evaluation with derivatives.
template <typename Scalar>
struct CubicPoly {
  Vec2<Scalar> c0, c1, c2, c3;

  explicit CubicPoly(const ControlPoints<Scalar>& p)
      : c0(p[0]),
        c1(Scalar(3) * (p[1] - p[0])),
        c2(Scalar(3) * (p[2] - Scalar(2) * p[1] + p[0])),
        c3(p[3] - Scalar(3) * p[2] + Scalar(3) * p[1] - p[0]) {}

  Vec2<Scalar> value(Scalar s) const { return c0 + s * (c1 + s * (c2 + s * c3)); }
  Vec2<Scalar> d1(Scalar s) const { return c1 + s * (Scalar(2) * c2 + Scalar(3) * s * c3); }
  Vec2<Scalar> d2(Scalar s) const { return Scalar(2) * c2 + Scalar(6) * s * c3; }
};

template <typename Scalar>
struct OriginProjection {
  Scalar dist2;       // squared distance from the origin to the curve
  Scalar s;           // minimizing parameter
  Vec2<Scalar> foot;  // curve point at s
};

inline constexpr int kProjectionSamples = 32;
inline constexpr int kProjectionNewtonIters = 8;
// Newton and bisection steps together.
inline constexpr int kProjectionMaxSteps = 64;

template <typename Scalar>
Scalar sample_param(int i) {
  return Scalar(i) / Scalar(kProjectionSamples - 1);
}

namespace detail {

// Newton on g(s) = C(s) . C'(s) (half the derivative of |C(s)|^2) starting
// at s, kept inside [lo, hi]: the bracket shrinks by the sign of g and any
// step that leaves it, or meets non-positive curvature, is replaced by
// bisection. Plain Newton wanders near cusps, where |C'| vanishes.
template <typename Scalar>
Scalar refine_projection(const CubicPoly<Scalar>& poly, Scalar s, Scalar lo, Scalar hi) {
  for (int it = 0, newton = 0; it < kProjectionMaxSteps && newton < kProjectionNewtonIters; ++it) {
    const Vec2<Scalar> c = poly.value(s);
    const Vec2<Scalar> d1 = poly.d1(s);
    const Scalar g = c.dot(d1);
    if (g == Scalar(0)) break;
    if (g < Scalar(0)) lo = s;
    else hi = s;
    if ((s == Scalar(0) && g > Scalar(0)) || (s == Scalar(1) && g < Scalar(0))) break;
    const Scalar h = d1.squaredNorm() + c.dot(poly.d2(s));
    Scalar next = h > Scalar(0) ? s - g / h : lo - Scalar(1);
    if (next > lo && next < hi) {
      ++newton;
    } else {
      next = lo + (hi - lo) / Scalar(2);
    }
    if (next == s || hi - lo <= std::numeric_limits<Scalar>::epsilon()) break;
    s = next;
  }
  return s;
}

template <typename Scalar>
std::array<Scalar, kProjectionSamples> sample_dist2(const CubicPoly<Scalar>& poly) {
  std::array<Scalar, kProjectionSamples> f;
  for (int i = 0; i < kProjectionSamples; ++i)
    f[i] = poly.value(Scalar(i) / Scalar(kProjectionSamples - 1)).squaredNorm();
  return f;
}

template <typename Scalar>
bool sampled_local_min(const std::array<Scalar, kProjectionSamples>& f, int i) {
  return (i == 0 || f[i] <= f[i - 1]) && (i == kProjectionSamples - 1 || f[i] <= f[i + 1]);
}

}  // namespace detail

/// Closest curve point to the origin. Samples s uniformly, then runs clamped
/// Newton on d/ds |C(s)|^2 from every sampled local minimum and keeps the best
/// candidate seen (samples included).
template <typename Scalar>
OriginProjection<Scalar> project_origin(const ControlPoints<Scalar>& p) {
  const CubicPoly<Scalar> poly(p);
  constexpr int n = kProjectionSamples;
  const auto f = detail::sample_dist2(poly);

  int best = 0;
  for (int i = 1; i < n; ++i)
    if (f[i] < f[best]) best = i;
  OriginProjection<Scalar> out{f[best], Scalar(best) / Scalar(n - 1),
                               poly.value(Scalar(best) / Scalar(n - 1))};

  for (int i = 0; i < n; ++i) {
    if (!detail::sampled_local_min(f, i)) continue;
    const Scalar s = detail::refine_projection(poly, sample_param<Scalar>(i),
                                               sample_param<Scalar>(std::max(i - 1, 0)),
                                               sample_param<Scalar>(std::min(i + 1, n - 1)));
    const Vec2<Scalar> c = poly.value(s);
    const Scalar d2 = c.squaredNorm();
    if (d2 < out.dist2) out = {d2, s, c};
  }
  return out;
}

/// Every refined local minimum of |C(s)| (one entry per distinct s).
template <typename Scalar>
std::vector<OriginProjection<Scalar>> local_projections(const ControlPoints<Scalar>& p) {
  const CubicPoly<Scalar> poly(p);
  const auto f = detail::sample_dist2(poly);
  std::vector<OriginProjection<Scalar>> out;
  for (int i = 0; i < kProjectionSamples; ++i) {
    if (!detail::sampled_local_min(f, i)) continue;
    const Scalar s = detail::refine_projection(
        poly, sample_param<Scalar>(i), sample_param<Scalar>(std::max(i - 1, 0)),
        sample_param<Scalar>(std::min(i + 1, kProjectionSamples - 1)));
    using std::abs;
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](const auto& q) { return abs(q.s - s) < Scalar(1e-6); });
    if (!seen) out.push_back({poly.value(s).squaredNorm(), s, poly.value(s)});
  }
  return out;
}

/// Offsets by which toroidal copies of a curve are replicated.
inline constexpr double kTorusPeriod = 2.0;

/// Control points relative to `origin`. On a torus the curve is first moved
/// by a whole period so that its first control point lies within one
/// half-period of the origin; the 3x3 block of copies is taken around that.
template <typename Scalar>
ControlPoints<Scalar> relative_points(const ControlPoints<Scalar>& p, const Vec2<Scalar>& origin,
                                      Topology topology) {
  ControlPoints<Scalar> rel;
  for (int k = 0; k < 4; ++k) rel[k] = p[k] - origin;
  if (topology == Topology::toroidal) {
    using std::round;
    const Vec2<Scalar> shift(-Scalar(kTorusPeriod) * round(rel[0].x() / Scalar(kTorusPeriod)),
                             -Scalar(kTorusPeriod) * round(rel[0].y() / Scalar(kTorusPeriod)));
    for (auto& q : rel) q += shift;
  }
  return rel;
}

struct CurveDistance {
  double distance;
  double s_star;
  Point foot;  // closest curve point, in the frame of the queried point
};

/// Euclidean distance from `point` to the stroke's curve; on a torus the
/// minimum over the 3x3 block of period-translated copies.
CurveDistance stroke_distance(const Stroke& stroke, const Point& point,
                              Topology topology = Topology::planar);

}  // namespace strokefit
