#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "strokefit/rasterizer.hpp"

namespace strokefit {

namespace {

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string hex_color(const Eigen::VectorXd& color) {
  auto byte = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  const int r = byte(color[0]);
  const int g = color.size() == 3 ? byte(color[1]) : r;
  const int b = color.size() == 3 ? byte(color[2]) : r;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string export_svg(const StrokeSet& strokes, const CanvasSpec& canvas) {
  validate(canvas);
  validate(strokes, canvas.channels);
  const double w = canvas.width;
  const double h = canvas.height;
  auto px = [&](const Point& p) {
    return fmt_num((p.x() + 1.0) * w / 2.0) + " " + fmt_num((p.y() + 1.0) * h / 2.0);
  };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(canvas.width) +
         "\" height=\"" + std::to_string(canvas.height) + "\" viewBox=\"0 0 " +
         std::to_string(canvas.width) + " " + std::to_string(canvas.height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  // Later paths paint over earlier ones; strokes[0] is the top layer.
  for (auto it = strokes.rbegin(); it != strokes.rend(); ++it) {
    const Stroke& s = *it;
    out += "<path d=\"M " + px(s.points[0]) + " C " + px(s.points[1]) + " " + px(s.points[2]) +
           " " + px(s.points[3]) + "\" fill=\"none\" stroke=\"" + hex_color(s.color) +
           "\" stroke-width=\"" + fmt_num(s.width * std::min(w, h) / 2.0) +
           "\" stroke-linecap=\"round\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace strokefit
