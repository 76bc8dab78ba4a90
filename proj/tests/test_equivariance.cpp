#include <doctest.h>

#include <cmath>

#include "strokefit/corpus.hpp"
#include "strokefit/equivariance.hpp"
#include "strokefit/errors.hpp"
#include "strokefit/losses.hpp"
#include "strokefit/random.hpp"

using namespace strokefit;

namespace {

Image noise(const CanvasSpec& canvas, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  Image img(canvas);
  std::uint64_t k = 0;
  for (auto& p : img.planes)
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform(k++);
  return img;
}

SceneOptions dyadic() {
  SceneOptions o;
  o.dyadic = true;
  return o;
}

}  // namespace

TEST_CASE("identity transform copies the image") {
  const CanvasSpec canvas{13, 9, 3, Topology::planar};
  const Image img = noise(canvas, 1);
  CHECK(transform_image(img, {}) == img);
  CHECK(transform_image(img, {AffineMap::identity(), Interpolation::nearest, Boundary::clamp}) == img);
}

TEST_CASE("whole-pixel torus shift is a circular roll") {
  const CanvasSpec canvas{16, 8, 1, Topology::toroidal};
  const Image img = noise(canvas, 2);
  const int dc = 5, dr = -3;
  const AffineMap shift = AffineMap::translate(2.0 * dc / canvas.width, 2.0 * dr / canvas.height);
  const Image out = transform_image(img, {shift, Interpolation::bilinear, Boundary::wrap});
  for (int r = 0; r < canvas.height; ++r)
    for (int c = 0; c < canvas.width; ++c) {
      const int sr = ((r - dr) % canvas.height + canvas.height) % canvas.height;
      const int sc = ((c - dc) % canvas.width + canvas.width) % canvas.width;
      CHECK(out(r, c, 0) == img(sr, sc, 0));
    }
  CHECK(transform_image(out, {shift.inverse(), Interpolation::bilinear, Boundary::wrap}) == img);
}

TEST_CASE("quarter turn permutes pixels") {
  const int n = 10;
  const CanvasSpec canvas{n, n, 2, Topology::planar};
  const Image img = noise(canvas, 3);
  const ImageTransformSpec turn{AffineMap::quarter_turns(1), Interpolation::bilinear, Boundary::clamp};
  const Image out = transform_image(img, turn);
  for (int ch = 0; ch < 2; ++ch)
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) CHECK(out(r, c, ch) == img(n - 1 - c, r, ch));
  Image four = img;
  for (int i = 0; i < 4; ++i) four = transform_image(four, turn);
  CHECK(four == img);
}

TEST_CASE("wrap boundary needs a torus") {
  const CanvasSpec canvas{8, 8, 1, Topology::planar};
  CHECK_THROWS_AS(transform_image(Image(canvas), {AffineMap::identity(), Interpolation::nearest, Boundary::wrap}),
                  ValidationError);
  CHECK(natural_boundary(canvas) == Boundary::clamp);
  CHECK(natural_boundary({8, 8, 1, Topology::toroidal}) == Boundary::wrap);
}

TEST_CASE("bilinear resampling interpolates half-pixel shifts") {
  const CanvasSpec canvas{8, 1, 1, Topology::toroidal};
  Image img(canvas);
  for (int c = 0; c < 8; ++c) img(0, c, 0) = c / 8.0;
  const Image out =
      transform_image(img, {AffineMap::translate(1.0 / 8, 0.0), Interpolation::bilinear, Boundary::wrap});
  for (int c = 1; c < 8; ++c) CHECK(out(0, c, 0) == doctest::Approx((c - 0.5) / 8.0));
  CHECK(out(0, 0, 0) == doctest::Approx((7.0 / 8 + 0.0) / 2));
}

TEST_CASE("render commutes exactly with grid symmetries") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const StrokeSet strokes = random_scene(seed, dyadic());
    const CanvasSpec torus{32, 32, 1, Topology::toroidal};
    CHECK(check_render_equivariance(strokes, AffineMap::translate(2.0 * 3 / 32, -2.0 * 7 / 32), torus, {}) == 0.0);
    const CanvasSpec plane{32, 32, 1, Topology::planar};
    for (int k = 1; k < 4; ++k)
      CHECK(check_render_equivariance(strokes, AffineMap::quarter_turns(k), plane, {}) == 0.0);
  }
}

TEST_CASE("similarity defect stays small for smooth interior strokes") {
  SceneOptions o;
  o.center_extent = 0.25;
  o.spread = 0.15;
  o.smooth = true;
  const CanvasSpec canvas{128, 128, 1, Topology::planar};
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const StrokeSet strokes = random_scene(seed, o);
    const AffineMap g = AffineMap::similarity(1.05, 0.4 + seed, 0.03, -0.05);
    CHECK(check_render_equivariance(strokes, g, canvas, {}) < 0.05);
  }
}

TEST_CASE("l1 loss condition under isometries") {
  const CanvasSpec canvas{32, 32, 1, Topology::toroidal};
  const StrokeSet strokes = random_scene(4, dyadic());
  const Image target = render(random_scene(5, dyadic()), canvas, {});
  const auto [moved, base] = check_loss_condition({}, target, strokes,
                                                  AffineMap::translate(2.0 * 5 / 32, 2.0 / 32), canvas, {});
  CHECK(base > 0.0);
  CHECK(moved == base);
  const CanvasSpec plane{32, 32, 1, Topology::planar};
  const Image target2 = render(random_scene(5, dyadic()), plane, {});
  const auto [turned, base2] = check_loss_condition({}, target2, strokes, AffineMap::quarter_turns(3), plane, {});
  CHECK(turned == base2);
}
