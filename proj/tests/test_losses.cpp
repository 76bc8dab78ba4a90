#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "helpers.hpp"
#include "strokefit/corpus.hpp"
#include "strokefit/errors.hpp"
#include "strokefit/hungarian.hpp"
#include "strokefit/losses.hpp"
#include "strokefit/random.hpp"

using namespace strokefit;
using testing::make_stroke;

namespace {

// Exhaustive oracle: the lexicographically first permutation whose cost is
// within the tie tolerance of the minimum.
std::pair<std::vector<int>, double> brute_force(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(n);
  const auto total = [&](const std::vector<int>& p) {
    double t = 0;
    for (int i = 0; i < n; ++i) t += cost(i, p[i]);
    return t;
  };
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do best = std::min(best, total(perm));
  while (std::next_permutation(perm.begin(), perm.end()));
  std::iota(perm.begin(), perm.end(), 0);
  do
    if (total(perm) <= best + 1e-9 * (1 + best)) break;
  while (std::next_permutation(perm.begin(), perm.end()));
  return {perm, best};
}

const Point O(0, 0);

}  // namespace

TEST_CASE("l1 image loss") {
  const CanvasSpec c{4, 4, 1, Topology::planar};
  const Image zeros(c, 0.0), ones(c, 1.0);
  Image half = zeros;
  half.planes[0].leftCols(2) = 0.5;
  CHECK(l1_image_loss(zeros, zeros) == 0.0);
  CHECK(l1_image_loss(zeros, ones) == 1.0);
  CHECK(l1_image_loss(zeros, half) == 0.25);
  CHECK_THROWS_AS(l1_image_loss(zeros, Image(CanvasSpec{4, 2, 1, Topology::planar})), ValidationError);
}

TEST_CASE("boundary and align penalties") {
  CHECK(boundary_penalty({make_stroke({Point(1, -1), O, O, Point(-1, 1)})}) == 0.0);
  CHECK(boundary_penalty({make_stroke({Point(1.5, 0), O, O, O})}) == 0.5);
  CHECK(boundary_penalty({make_stroke({Point(1.5, 0), Point(0, -2), O, O})}) == 1.5);
  CHECK(align_penalty({make_stroke({Point(-0.3, 0), O, O, Point(0.2, 0)})}) == 0.0);
  CHECK(align_penalty({make_stroke({Point(0.2, 0), O, O, Point(-0.3, 0)})}) == 0.5);
  CHECK(align_penalty({make_stroke({Point(0.2, 0), O, O, Point(-0.3, 0)}),
                       make_stroke({Point(0.1, 0), O, O, Point(0.0, 0)})}) == 0.6);
}

TEST_CASE("penalty gradient matches the formulas") {
  const StrokeSet s = {make_stroke({Point(1.5, 0.2), Point(0, -2), O, Point(-0.3, 0)})};
  const StrokeGrads g = penalty_grad(s);
  CHECK(g[0].d_points[0] == Point(2, 0));  // boundary and align both push t1.x
  CHECK(g[0].d_points[1] == Point(0, -1));
  CHECK(g[0].d_points[2] == Point(0, 0));
  CHECK(g[0].d_points[3] == Point(-1, 0));
}

TEST_CASE("boundary penalty is zero iff all points lie in the square") {
  CounterRng rng(5);
  for (int i = 0; i < 200; ++i) {
    Stroke s = make_stroke({O, O, O, O});
    bool inside = true;
    for (auto& p : s.points) {
      p = Point(rng.next_uniform(-1.2, 1.2), rng.next_uniform(-1.2, 1.2));
      inside = inside && p.cwiseAbs().maxCoeff() <= 1.0;
    }
    CHECK((boundary_penalty({s}) == 0.0) == inside);
  }
}

TEST_CASE("hungarian on small cases") {
  Eigen::MatrixXd a(2, 2), b(2, 2);
  a << 0, 1, 1, 0;
  b << 1, 2, 2, 1;
  CHECK(hungarian(a).permutation == std::vector<int>{0, 1});
  CHECK(hungarian(a).total_cost == 0.0);
  CHECK(hungarian(b).permutation == std::vector<int>{0, 1});
  CHECK(hungarian(b).total_cost == 2.0);
  Eigen::MatrixXd ties = Eigen::MatrixXd::Constant(3, 3, 1.0);
  CHECK(hungarian(ties).permutation == std::vector<int>{0, 1, 2});
  CHECK_THROWS_AS(hungarian(Eigen::MatrixXd(2, 3)), ValidationError);
  Eigen::MatrixXd bad = a;
  bad(0, 1) = NAN;
  CHECK_THROWS_AS(hungarian(bad), ValidationError);
}

TEST_CASE("hungarian matches exhaustive enumeration") {
  CounterRng rng(17);
  for (int t = 0; t < 120; ++t) {
    const int n = 1 + t % 7;
    Eigen::MatrixXd cost(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        cost(r, c) = t % 2 ? rng.next_uniform(0, 5) : std::floor(rng.next_uniform(0, 3));
    const auto [perm, best] = brute_force(cost);
    const Assignment a = hungarian(cost);
    CAPTURE(t);
    CHECK(a.permutation == perm);
    CHECK(a.total_cost <= best + 1e-12);
    std::vector<int> id(n);
    std::iota(id.begin(), id.end(), 0);
    CHECK(a.total_cost <= assignment_cost(cost, id));
  }
}

TEST_CASE("stroke l1") {
  const Stroke a = make_stroke({Point(0.1, 0.2), Point(0.3, 0.4), Point(0.5, 0.6), Point(0.7, 0.8)}, 0.5);
  Stroke b = a;
  CHECK(stroke_l1(a, b) == 0.0);
  b.points[0] += Point(0.1, -0.2);
  CHECK(stroke_l1(a, b) == doctest::Approx(0.3).epsilon(1e-15));
  b = a;
  b.color[0] = 0.9;
  CHECK(stroke_l1(a, b) == doctest::Approx(0.4).epsilon(1e-15));
  b = a;
  b.width = 0.08;
  CHECK(stroke_l1(a, b) == 0.0);
  CHECK(stroke_l1(a, b, true) == doctest::Approx(0.03).epsilon(1e-14));
  CHECK_THROWS_AS(stroke_l1(a, make_stroke(a.points, 0.5, 0.05, 3)), ValidationError);
}

TEST_CASE("guidance loss matches enumeration and is permutation invariant") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    SceneOptions o;
    o.strokes = 1 + seed % 5;
    o.channels = seed % 3 == 0 ? 3 : 1;
    const StrokeSet pred = random_scene(seed, o);
    const StrokeSet gt = random_scene(seed + 1000, o);
    const int n = o.strokes;
    Eigen::MatrixXd cost(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) cost(r, c) = stroke_l1(gt[r], pred[c]);
    const auto [perm, best] = brute_force(cost);
    const auto res = guidance_loss(pred, gt);
    CAPTURE(seed);
    CHECK(res.assignment.permutation == perm);
    CHECK(res.loss == doctest::Approx(best).epsilon(1e-14));

    StrokeSet shuffled = pred;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + seed % n, shuffled.end());
    CHECK(guidance_loss(shuffled, gt).loss == res.loss);
    CHECK(guidance_loss(gt, pred).loss == res.loss);
  }
  const StrokeSet a = random_scene(1, {});
  CHECK(guidance_loss(a, a).loss == 0.0);
  StrokeSet swapped = a;
  std::swap(swapped[0], swapped[2]);
  CHECK(guidance_loss(swapped, a).loss == 0.0);
  CHECK_THROWS_AS(guidance_loss(a, StrokeSet(a.begin(), a.begin() + 2)), ValidationError);
}

TEST_CASE("augmented loss") {
  const CanvasSpec torus{32, 32, 1, Topology::toroidal};
  const StrokeSet strokes = random_scene(3, {});
  const Image target = render(random_scene(4, {}), torus, {});
  MetricSpec m;
  CHECK(augmented_loss(m, target, strokes, torus, {}, 7) ==
        l1_image_loss(target, render(strokes, torus, {})));

  m.augment_samples = 5;
  const double v = augmented_loss(m, target, strokes, torus, {}, 7);
  CHECK(v == augmented_loss(m, target, strokes, torus, {}, 7));
  CHECK(v != augmented_loss(m, target, strokes, torus, {}, 8));

  // Whole-pixel translations only: both sides move by the same permutation.
  MetricSpec shifts;
  shifts.augment_samples = 6;
  shifts.ranges = {0.0, 0.5, 1.0, 1.0, true};
  SceneOptions dy;
  dy.dyadic = true;
  const StrokeSet exact = random_scene(6, dy);
  CHECK(augmented_loss(shifts, render(exact, torus, {}), exact, torus, {}, 3) == 0.0);

  MetricSpec iso;
  iso.augment_samples = 4;
  iso.ranges.min_scale = iso.ranges.max_scale = 1.0;
  CHECK(augmented_loss(iso, render(strokes, torus, {}), strokes, torus, {}, 1) < 5e-2);

  MetricSpec bad;
  bad.augment_samples = -1;
  CHECK_THROWS_AS(validate(bad), ValidationError);
  bad = {};
  bad.kind = MetricKind::external;
  CHECK_THROWS_AS(validate(bad), ValidationError);
}

TEST_CASE("external metric plugs into the augmented loss") {
  const CanvasSpec canvas{16, 16, 1, Topology::planar};
  const StrokeSet strokes = random_scene(2, {});
  const Image target = render(random_scene(3, {}), canvas, {});
  MetricSpec m;
  m.kind = MetricKind::external;
  m.external = [](const Image& t, const Image& s, Image* grad) {
    double sum = 0;
    if (grad) *grad = Image(s.canvas);
    for (int r = 0; r < s.height(); ++r)
      for (int c = 0; c < s.width(); ++c) {
        const double d = s(r, c, 0) - t(r, c, 0);
        sum += d * d;
        if (grad) (*grad)(r, c, 0) = 2 * d;
      }
    return sum;
  };
  const auto lg = augmented_loss_with_grad(m, target, strokes, canvas, {}, 0);
  CHECK(lg.loss == doctest::Approx((render(strokes, canvas, {}).planes[0] - target.planes[0]).square().sum()));
  CHECK(lg.grads.size() == strokes.size());
}
