#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <iterator>

#include "strokefit/corpus.hpp"
#include "strokefit/errors.hpp"
#include "strokefit/init.hpp"
#include "strokefit/rasterizer.hpp"

using namespace strokefit;

namespace {

// (sig((2c-1)b) - sig(-b)) / (sig(b) - sig(-b)) for c = 0.75, b = 5, evaluated
// with 50-digit arithmetic.
constexpr double kAdjust075 = 0.92989628345489184306766718130734;

SaliencyMap zeros(const CanvasSpec& canvas) { return {canvas, Plane::Zero(canvas.height, canvas.width)}; }

}  // namespace

TEST_CASE("adjust_color closed form") {
  for (double beta : {0.1, 1.0, 5.0, 30.0}) {
    CHECK(adjust_color(0.0, beta) == 0.0);
    CHECK(adjust_color(0.5, beta) == 0.5);
    CHECK(adjust_color(1.0, beta) == 1.0);
  }
  CHECK(std::abs(adjust_color(0.75, 5.0) - kAdjust075) < 1e-9);
  // Literal sigmoid form as a cross-check away from the exact points.
  const auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  for (double c : {0.1, 0.3, 0.62, 0.9})
    CHECK(adjust_color(c, 5.0) ==
          doctest::Approx((sig((2 * c - 1) * 5) - sig(-5)) / (sig(5) - sig(-5))).epsilon(1e-13));
  CHECK_THROWS_AS(adjust_color(0.5, 0.0), ValidationError);
  CHECK_THROWS_AS(adjust_color(1.5, 5.0), ValidationError);
}

TEST_CASE("adjust_color is monotone and per channel") {
  double prev = -1.0;
  for (int k = 0; k <= 2000; ++k) {
    const double v = adjust_color(k / 2000.0, 5.0);
    CHECK(v > prev);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    prev = v;
  }
  const Eigen::VectorXd c = adjust_color(Eigen::Vector3d(0.0, 0.5, 0.75), 5.0);
  CHECK(c[0] == 0.0);
  CHECK(c[1] == 0.5);
  CHECK(c[2] == adjust_color(0.75, 5.0));
}

TEST_CASE("sobel saliency") {
  const CanvasSpec canvas{12, 10, 1, Topology::planar};
  const SaliencyMap flat = sobel_saliency(Image(canvas, 0.4));
  CHECK(flat.weights.maxCoeff() == 0.0);

  Image step(canvas, 0.0);
  step.planes[0].rightCols(6) = 1.0;
  const SaliencyMap edge = sobel_saliency(step);
  CHECK(edge.weights.maxCoeff() == 1.0);
  for (int r = 0; r < canvas.height; ++r) {
    CHECK(edge.weights(r, 5) == 1.0);
    CHECK(edge.weights(r, 6) == 1.0);
    CHECK(edge.weights(r, 0) == 0.0);
    CHECK(edge.weights(r, 11) == 0.0);
  }

  const Image rendered = render(random_scene(1, {}), canvas, {});
  CHECK(sobel_saliency(rendered).weights.maxCoeff() == 1.0);
  CHECK(sobel_saliency(rendered).weights.minCoeff() >= 0.0);
}

TEST_CASE("greedy init anchors the first stroke at the saliency peak") {
  const CanvasSpec canvas{16, 16, 1, Topology::planar};
  SaliencyMap sal = zeros(canvas);
  sal.weights(7, 9) = 1.0;
  InitConfig cfg;
  cfg.n_strokes = 1;
  const Image img(canvas, 0.75);
  const InitResult res = greedy_init(sal, img, cfg);
  REQUIRE(res.strokes.size() == 1);
  CHECK(res.strokes[0].points[0] == canvas.pixel_center(7, 9));
  CHECK(res.strokes[0].color[0] == adjust_color(0.75, 5.0));
  CHECK(res.strokes[0].width == cfg.stroke_width);
  CHECK_FALSE(res.uniform_fallback);
}

TEST_CASE("suppression subtracts the image value at the chosen peak") {
  const CanvasSpec canvas{32, 32, 1, Topology::planar};
  SaliencyMap sal = zeros(canvas);
  sal.weights(7, 9) = 1.0;
  sal.weights(30, 30) = 0.5;
  InitConfig cfg;
  cfg.n_strokes = 2;
  Image img(canvas, 0.0);

  // 1 - 0.4 = 0.6 stays above 0.5: the same peak wins again.
  img(7, 9, 0) = 0.4;
  CHECK(greedy_init(sal, img, cfg).strokes[1].points[0] == canvas.pixel_center(7, 9));
  // 1 - 0.6 = 0.4 drops below 0.5.
  img(7, 9, 0) = 0.6;
  CHECK(greedy_init(sal, img, cfg).strokes[1].points[0] == canvas.pixel_center(30, 30));
}

TEST_CASE("constant saliency: row-major tie-break and determinism") {
  const CanvasSpec canvas{20, 16, 1, Topology::planar};
  SaliencyMap sal{canvas, Plane::Constant(16, 20, 0.5)};
  InitConfig cfg;
  cfg.n_strokes = 2;
  cfg.seed = 99;
  const Image img(canvas, 0.8);
  const InitResult a = greedy_init(sal, img, cfg);
  const InitResult b = greedy_init(sal, img, cfg);
  CHECK(a.strokes[0].points[0] == canvas.pixel_center(0, 0));
  // Suppression around (0,0) leaves the far corner as the unique maximum.
  CHECK(a.strokes[1].points[0] == canvas.pixel_center(15, 19));
  for (int i = 0; i < 2; ++i) {
    CHECK(a.strokes[i].points == b.strokes[i].points);
    CHECK(a.strokes[i].color == b.strokes[i].color);
  }
  cfg.seed = 100;
  CHECK(greedy_init(sal, img, cfg).strokes[0].points[1] != a.strokes[0].points[1]);
}

TEST_CASE("separated equal peaks give distinct anchors") {
  const CanvasSpec canvas{48, 48, 1, Topology::planar};
  SaliencyMap sal = zeros(canvas);
  const int peaks[5][2] = {{4, 4}, {4, 43}, {24, 24}, {43, 4}, {43, 43}};
  for (const auto& p : peaks) sal.weights(p[0], p[1]) = 1.0;
  InitConfig cfg;
  cfg.n_strokes = 5;
  const auto strokes = greedy_init(sal, Image(canvas, 0.3), cfg).strokes;
  for (size_t i = 0; i < strokes.size(); ++i) {
    CHECK(std::any_of(std::begin(peaks), std::end(peaks), [&](const auto& p) {
      return strokes[i].points[0] == canvas.pixel_center(p[0], p[1]);
    }));
    for (size_t j = 0; j < i; ++j) CHECK(strokes[i].points[0] != strokes[j].points[0]);
  }
}

TEST_CASE("perturbations have the configured spread") {
  const CanvasSpec canvas{64, 64, 1, Topology::planar};
  const SaliencyMap sal{canvas, Plane::Constant(64, 64, 1.0)};
  InitConfig cfg;
  cfg.n_strokes = 400;
  cfg.perturb_std = 0.05;
  const auto strokes = greedy_init(sal, Image(canvas, 0.0), cfg).strokes;
  double sum2 = 0.0;
  int count = 0;
  for (const auto& s : strokes)
    for (int k = 1; k < 4; ++k) {
      sum2 += (s.points[k] - s.points[0]).squaredNorm();
      count += 2;
    }
  CHECK(std::sqrt(sum2 / count) == doctest::Approx(0.05).epsilon(0.05));
}

TEST_CASE("all-zero saliency falls back to the first pixel") {
  const CanvasSpec canvas{8, 8, 1, Topology::planar};
  InitConfig cfg;
  cfg.n_strokes = 2;
  const InitResult res = greedy_init(zeros(canvas), Image(canvas, 1.0), cfg);
  CHECK(res.uniform_fallback);
  CHECK(res.strokes[0].points[0] == canvas.pixel_center(0, 0));
}

TEST_CASE("multichannel images suppress by luminance and keep weights nonnegative") {
  const CanvasSpec canvas{24, 24, 3, Topology::toroidal};
  SceneOptions o;
  o.channels = 3;
  const Image img = render(random_scene(7, o), canvas, {});
  const SaliencyMap sal = sobel_saliency(img);
  InitConfig cfg;
  cfg.n_strokes = 10;
  const auto strokes = greedy_init(sal, img, cfg).strokes;
  CHECK(strokes.size() == 10);
  for (const auto& s : strokes) CHECK(s.color.size() == 3);
}

TEST_CASE("init validation") {
  const CanvasSpec canvas{8, 8, 1, Topology::planar};
  InitConfig cfg;
  cfg.beta = 0.0;
  CHECK_THROWS_AS(greedy_init(zeros(canvas), Image(canvas), cfg), ValidationError);
  cfg = {};
  cfg.n_strokes = 65;
  CHECK_THROWS_AS(greedy_init(zeros(canvas), Image(canvas), cfg), ValidationError);
  cfg = {};
  CHECK_THROWS_AS(greedy_init(zeros(CanvasSpec{8, 4, 1, Topology::planar}), Image(canvas), cfg),
                  ValidationError);
  CHECK(InitConfig{}.sigma == 5.0);
  CHECK(InitConfig{}.beta == 5.0);
}
