#pragma once

#include <Eigen/Core>
#include <Eigen/LU>

#include <array>
#include <cmath>
#include <vector>

#include "strokefit/errors.hpp"

namespace strokefit {

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Point = Vec2<double>;

enum class Topology { planar, toroidal };

/// Pixel grid over the square [-1,1]^2. Pixel (row, col) has its center at
/// (-1 + (2 col + 1) / W, -1 + (2 row + 1) / H).
struct CanvasSpec {
  int width = 64;
  int height = 64;
  int channels = 1;
  Topology topology = Topology::planar;

  Point pixel_center(int row, int col) const {
    return {-1.0 + (2.0 * col + 1.0) / width, -1.0 + (2.0 * row + 1.0) / height};
  }
  // Continuous pixel coordinates (col, row) of a canvas point; centers are integral.
  Eigen::Vector2d to_pixel(const Point& p) const {
    return {(p.x() + 1.0) * width / 2.0 - 0.5, (p.y() + 1.0) * height / 2.0 - 0.5};
  }
  long pixel_count() const { return static_cast<long>(width) * height; }

  bool operator==(const CanvasSpec&) const = default;
};

void validate(const CanvasSpec& canvas);

/// A cubic stroke: four control points, a per-channel color and a width.
template <typename Scalar>
struct BasicStroke {
  std::array<Vec2<Scalar>, 4> points;
  VecX<Scalar> color;
  Scalar width = Scalar(0.05);

  int channels() const { return static_cast<int>(color.size()); }

  BasicStroke reversed() const {
    return {{points[3], points[2], points[1], points[0]}, color, width};
  }
};

using Stroke = BasicStroke<double>;

/// Ordered strokes; index 0 is composited on top.
using StrokeSet = std::vector<Stroke>;

void validate(const Stroke& stroke);
void validate(const Stroke& stroke, int channels);
void validate(const StrokeSet& strokes, int channels);

/// x -> linear * x + translation
template <typename Scalar>
struct BasicAffineMap {
  Mat2<Scalar> linear = Mat2<Scalar>::Identity();
  Vec2<Scalar> translation = Vec2<Scalar>::Zero();

  static BasicAffineMap identity() { return {}; }

  static BasicAffineMap translate(Scalar tx, Scalar ty) {
    BasicAffineMap m;
    m.translation = {tx, ty};
    return m;
  }

  static BasicAffineMap rotate(Scalar radians) {
    using std::cos;
    using std::sin;
    BasicAffineMap m;
    m.linear << cos(radians), -sin(radians), sin(radians), cos(radians);
    return m;
  }

  // Quarter turns counter-clockwise, built from exact 0/±1 entries.
  static BasicAffineMap quarter_turns(int k) {
    BasicAffineMap m;
    switch (((k % 4) + 4) % 4) {
      case 1: m.linear << 0, -1, 1, 0; break;
      case 2: m.linear << -1, 0, 0, -1; break;
      case 3: m.linear << 0, 1, -1, 0; break;
      default: break;
    }
    return m;
  }

  static BasicAffineMap scale(Scalar s) {
    BasicAffineMap m;
    m.linear *= s;
    return m;
  }

  // x -> scale * R(radians) x + (tx, ty)
  static BasicAffineMap similarity(Scalar scale, Scalar radians, Scalar tx, Scalar ty) {
    BasicAffineMap m = rotate(radians);
    m.linear *= scale;
    m.translation = {tx, ty};
    return m;
  }

  Vec2<Scalar> operator()(const Vec2<Scalar>& p) const { return linear * p + translation; }

  /// Composition: (a * b)(x) == a(b(x)).
  BasicAffineMap operator*(const BasicAffineMap& b) const {
    BasicAffineMap m;
    m.linear = linear * b.linear;
    m.translation = linear * b.translation + translation;
    return m;
  }

  Scalar determinant() const { return linear.determinant(); }

  BasicAffineMap inverse() const {
    if (determinant() == Scalar(0)) throw ValidationError("affine map is not invertible");
    BasicAffineMap m;
    m.linear = linear.inverse();
    m.translation = -(m.linear * translation);
    return m;
  }

  /// True when linear^T linear is a multiple of the identity.
  bool is_similarity(Scalar tol = Scalar(1e-12)) const {
    using std::abs;
    const Mat2<Scalar> g = linear.transpose() * linear;
    const Scalar s2 = (g(0, 0) + g(1, 1)) / 2;
    if (!(s2 > Scalar(0))) return false;
    return abs(g(0, 0) - s2) <= tol * s2 && abs(g(1, 1) - s2) <= tol * s2 &&
           abs(g(0, 1)) <= tol * s2;
  }

  Scalar similarity_scale() const {
    using std::abs;
    using std::sqrt;
    return sqrt(abs(determinant()));
  }
};

using AffineMap = BasicAffineMap<double>;

Point apply_affine_point(const AffineMap& map, const Point& point);

/// Maps control points; width is multiplied by the scale factor of a
/// similarity and left alone for any other affine map. Color is untouched.
Stroke apply_affine_stroke(const AffineMap& map, const Stroke& stroke);
StrokeSet apply_affine_strokes(const AffineMap& map, const StrokeSet& strokes);

// Width factor applied by apply_affine_stroke.
double width_factor(const AffineMap& map);

}  // namespace strokefit
