#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "helpers.hpp"
#include "strokefit/bezier.hpp"
#include "strokefit/corpus.hpp"
#include "strokefit/errors.hpp"
#include "strokefit/rasterizer.hpp"

using namespace strokefit;
using testing::make_stroke;
using testing::stroke_with_alpha;

namespace {

const CanvasSpec kPixel{1, 1, 1, Topology::planar};

double pixel(const StrokeSet& strokes, double background) {
  RenderConfig rc;
  rc.background = background;
  return render(strokes, kPixel, rc)(0, 0, 0);
}

}  // namespace

TEST_CASE("field intensity and annealing") {
  CHECK(field_intensity(0.0, 0.1, 0.0) == 1.0);
  CHECK(field_intensity(0.0, 0.1, 1.0) == 1.0);
  CHECK(field_intensity(0.1, 0.1, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(field_intensity(0.1, 0.1, 0.0) == doctest::Approx(std::exp(-1.0 / 0.4)).epsilon(1e-15));
  CHECK(field_intensity(0.07, 0.2, 0.5) ==
        doctest::Approx(std::exp(-std::pow(0.07, 1.5) / std::pow(1.5 * 0.2, 2))).epsilon(1e-15));
}

TEST_CASE("stroke_field is clamped and follows the curve distance") {
  const CanvasSpec canvas{16, 16, 1, Topology::planar};
  const Stroke s = make_stroke({Point(-0.5, 0.0625), Point(-0.2, 0.0625), Point(0.2, 0.0625),
                                Point(0.5, 0.0625)}, 0.0, 0.1);
  RenderConfig rc;
  const IntensityField f = stroke_field(s, canvas, rc);
  CHECK(f.alpha.maxCoeff() <= rc.intensity_clamp);
  CHECK(f.alpha.minCoeff() >= 0.0);
  CHECK(f.alpha(8, 8) == rc.intensity_clamp);  // center lies on the segment
  const Point u = canvas.pixel_center(3, 8);
  CHECK(f.alpha(3, 8) ==
        doctest::Approx(field_intensity(stroke_distance(s, u).distance, 0.1, 1.0)).epsilon(1e-14));
}

TEST_CASE("composition hand cases") {
  const Stroke a = stroke_with_alpha(0.6, 1.0);
  CHECK(pixel({a}, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pixel({a}, 0.0) == doctest::Approx(0.6).epsilon(1e-12));
  const Stroke b = stroke_with_alpha(0.8, 0.5);
  CHECK(std::abs(pixel({a, b}, 0.0) - 0.76) < 1e-12);
}

TEST_CASE("a full-intensity top stroke occludes everything below") {
  const Point o(0, 0);
  for (double top_color : {0.0, 0.3, 1.0})
    for (double below_alpha : {0.1, 0.5, 0.99}) {
      const Stroke top = make_stroke({o, o, o, o}, top_color);
      const Stroke below = stroke_with_alpha(below_alpha, 1.0 - top_color);
      CHECK(std::abs(pixel({top, below}, 1.0) - top_color) < 1e-5);
      CHECK(std::abs(pixel({top, below}, 0.0) - top_color) < 1e-5);
    }
}

TEST_CASE("over composition blends color into the attenuation") {
  RenderConfig rc;
  rc.composition = Composition::over;
  rc.background = 0.0;
  const Stroke a = stroke_with_alpha(0.6, 0.5);
  const Stroke b = stroke_with_alpha(0.8, 1.0);
  // atten_a = 0.3, so b shows through with weight 0.7.
  CHECK(render({a, b}, kPixel, rc)(0, 0, 0) == doctest::Approx(0.3 + 0.8 * 0.7).epsilon(1e-12));
}

TEST_CASE("multichannel strokes composite per channel") {
  const CanvasSpec rgb{1, 1, 3, Topology::planar};
  Stroke a = stroke_with_alpha(0.6, 0.0);
  a.color = Eigen::Vector3d(1.0, 0.5, 0.0);
  RenderConfig rc;
  rc.background = 0.0;
  const Image img = render({a}, rgb, rc);
  CHECK(img(0, 0, 0) == doctest::Approx(0.6));
  CHECK(img(0, 0, 1) == doctest::Approx(0.3));
  CHECK(img(0, 0, 2) == 0.0);
}

TEST_CASE("adding a stroke below leaves fully covered pixels unchanged") {
  const CanvasSpec canvas{32, 32, 1, Topology::planar};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const StrokeSet strokes = random_scene(seed, {});
    const RenderConfig rc;
    StrokeSet more = strokes;
    more.push_back(random_scene(seed + 100, {})[0]);
    const Image base = render(strokes, canvas, rc);
    const Image extra = render(more, canvas, rc);
    const IntensityField top = stroke_field(strokes[0], canvas, rc);
    for (int r = 0; r < 32; ++r)
      for (int c = 0; c < 32; ++c)
        if (top.alpha(r, c) >= rc.intensity_clamp) CHECK(std::abs(extra(r, c, 0) - base(r, c, 0)) < 1e-5);
  }
}

TEST_CASE("strokes with disjoint support commute") {
  const CanvasSpec canvas{32, 32, 1, Topology::planar};
  const Stroke a = make_stroke({Point(-0.8, -0.8), Point(-0.7, -0.6), Point(-0.5, -0.7), Point(-0.4, -0.5)}, 0.2);
  const Stroke b = make_stroke({Point(0.4, 0.5), Point(0.5, 0.7), Point(0.7, 0.6), Point(0.8, 0.8)}, 0.7);
  CHECK(render({a, b}, canvas, {}).max_abs_diff(render({b, a}, canvas, {})) < 1e-6);
}

TEST_CASE("render is continuous in the anneal parameter") {
  const CanvasSpec canvas{32, 32, 1, Topology::planar};
  const StrokeSet strokes = random_scene(3, {});
  for (double tau = 0.0; tau < 0.99; tau += 0.1) {
    RenderConfig a, b;
    a.anneal_tau = tau;
    b.anneal_tau = tau + 0.01;
    CHECK(render(strokes, canvas, a).max_abs_diff(render(strokes, canvas, b)) < 0.1);
  }
}

TEST_CASE("supersampling averages sub-pixel samples") {
  const CanvasSpec canvas{16, 16, 1, Topology::planar};
  const StrokeSet strokes = random_scene(5, {});
  RenderConfig rc;
  rc.supersample = 3;
  const Image fine = render(strokes, canvas, rc);
  const Image coarse = render(strokes, canvas, {});
  CHECK(fine.max_abs_diff(coarse) > 0.0);
  CHECK(fine.max_abs_diff(coarse) < 0.5);
}

TEST_CASE("render output is identical across thread counts") {
  const CanvasSpec canvas{48, 40, 3, Topology::toroidal};
  SceneOptions o;
  o.channels = 3;
  o.strokes = 6;
  const StrokeSet strokes = random_scene(11, o);
  setenv("STROKEFIT_THREADS", "1", 1);
  const Image one = render(strokes, canvas, {});
  setenv("STROKEFIT_THREADS", "4", 1);
  const Image four = render(strokes, canvas, {});
  unsetenv("STROKEFIT_THREADS");
  CHECK(one == four);
}

TEST_CASE("render validates its inputs") {
  const CanvasSpec canvas{8, 8, 1, Topology::planar};
  CHECK_THROWS_AS(render({}, canvas, {}), ValidationError);
  RenderConfig rc;
  rc.anneal_tau = 1.5;
  CHECK_THROWS_AS(render(random_scene(0, {}), canvas, rc), ValidationError);
  SceneOptions rgb;
  rgb.channels = 3;
  CHECK_THROWS_AS(render(random_scene(0, rgb), canvas, {}), ValidationError);
}

TEST_CASE("svg export") {
  const CanvasSpec canvas{40, 30, 1, Topology::planar};
  const StrokeSet one = {make_stroke({Point(-1, -1), Point(0, 0), Point(0.5, 0), Point(1, 1)}, 0.0, 0.1)};
  const std::string doc = export_svg(one, canvas);
  size_t paths = 0;
  for (size_t p = doc.find("<path"); p != std::string::npos; p = doc.find("<path", p + 1)) ++paths;
  CHECK(paths == 1);
  CHECK(doc.find("M 0.0000 0.0000 C 20.0000 15.0000 30.0000 15.0000 40.0000 30.0000") != std::string::npos);
  CHECK(doc.find("stroke-width=\"1.5000\"") != std::string::npos);
  CHECK(doc.find("stroke-linecap=\"round\"") != std::string::npos);
  CHECK(doc == export_svg(one, canvas));

  SceneOptions rgb;
  rgb.channels = 3;
  CHECK_THROWS_AS(export_svg(random_scene(0, rgb), canvas), ValidationError);
}
