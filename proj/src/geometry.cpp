#include "strokefit/bezier.hpp"
#include "strokefit/geometry.hpp"
#include "strokefit/image.hpp"

#include <string>

namespace strokefit {

void validate(const CanvasSpec& canvas) {
  if (canvas.width <= 0 || canvas.height <= 0)
    throw ValidationError("canvas dimensions must be positive");
  if (canvas.channels != 1 && canvas.channels != 3)
    throw ValidationError("canvas channels must be 1 or 3");
}

void validate(const Stroke& stroke) {
  for (const auto& p : stroke.points)
    if (!p.allFinite()) throw ValidationError("stroke control point is not finite");
  if (stroke.color.size() != 1 && stroke.color.size() != 3)
    throw ValidationError("stroke color must have 1 or 3 channels");
  for (Eigen::Index c = 0; c < stroke.color.size(); ++c)
    if (!(stroke.color[c] >= 0.0 && stroke.color[c] <= 1.0))
      throw ValidationError("stroke color component " + std::to_string(c) + " outside [0,1]");
  if (!(stroke.width > 0.0 && stroke.width <= 1.0))
    throw ValidationError("stroke width must lie in (0,1]");
}

void validate(const Stroke& stroke, int channels) {
  validate(stroke);
  if (stroke.channels() != channels)
    throw ValidationError("stroke has " + std::to_string(stroke.channels()) +
                          " color channels, canvas has " + std::to_string(channels));
}

void validate(const StrokeSet& strokes, int channels) {
  if (strokes.empty()) throw ValidationError("stroke set is empty");
  for (const auto& s : strokes) validate(s, channels);
}

Point bezier_point(const Stroke& stroke, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("curve parameter outside [0,1]");
  return bezier_eval(ControlPoints<double>(stroke.points), s);
}

CurveDistance stroke_distance(const Stroke& stroke, const Point& point, Topology topology) {
  const auto rel = relative_points(ControlPoints<double>(stroke.points), point, topology);
  if (topology == Topology::planar) {
    const auto proj = project_origin(rel);
    return {std::sqrt(proj.dist2), proj.s, proj.foot + point};
  }
  OriginProjection<double> best{std::numeric_limits<double>::infinity(), 0.0, Point::Zero()};
  for (int oy = -1; oy <= 1; ++oy) {
    for (int ox = -1; ox <= 1; ++ox) {
      const Point offset(ox * kTorusPeriod, oy * kTorusPeriod);
      ControlPoints<double> copy;
      for (int k = 0; k < 4; ++k) copy[k] = rel[k] + offset;
      const auto proj = project_origin(copy);
      if (proj.dist2 < best.dist2) best = proj;
    }
  }
  return {std::sqrt(best.dist2), best.s, best.foot + point};
}

Point apply_affine_point(const AffineMap& map, const Point& point) { return map(point); }

double width_factor(const AffineMap& map) {
  return map.is_similarity() ? map.similarity_scale() : 1.0;
}

Stroke apply_affine_stroke(const AffineMap& map, const Stroke& stroke) {
  Stroke out = stroke;
  for (auto& p : out.points) p = map(p);
  out.width = stroke.width * width_factor(map);
  return out;
}

StrokeSet apply_affine_strokes(const AffineMap& map, const StrokeSet& strokes) {
  StrokeSet out;
  out.reserve(strokes.size());
  for (const auto& s : strokes) out.push_back(apply_affine_stroke(map, s));
  return out;
}

double Image::max_abs_diff(const Image& other) const {
  if (!same_shape(other)) throw ValidationError("image shapes differ");
  double m = 0.0;
  for (int c = 0; c < channels(); ++c)
    m = std::max(m, (planes[c] - other.planes[c]).abs().maxCoeff());
  return m;
}

bool Image::operator==(const Image& other) const {
  if (!same_shape(other)) return false;
  for (int c = 0; c < channels(); ++c)
    if (!(planes[c] == other.planes[c]).all()) return false;
  return true;
}

void validate_unit_range(const Image& image) {
  for (const auto& p : image.planes) {
    if (p.rows() != image.height() || p.cols() != image.width())
      throw ValidationError("image plane does not match canvas");
    if (!p.allFinite() || p.minCoeff() < 0.0 || p.maxCoeff() > 1.0)
      throw ValidationError("image values must lie in [0,1]");
  }
}

Plane luminance(const Image& image) {
  if (image.channels() == 3)
    return 0.299 * image.planes[0] + 0.587 * image.planes[1] + 0.114 * image.planes[2];
  return image.planes[0];
}

}  // namespace strokefit
