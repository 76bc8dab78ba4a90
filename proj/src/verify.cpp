#include "strokefit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "strokefit/adam.hpp"
#include "strokefit/bezier.hpp"
#include "strokefit/corpus.hpp"
#include "strokefit/equivariance.hpp"
#include "strokefit/gradients.hpp"
#include "strokefit/hungarian.hpp"
#include "strokefit/init.hpp"
#include "strokefit/losses.hpp"
#include "strokefit/optimizer.hpp"
#include "strokefit/random.hpp"
#include "strokefit/trace_io.hpp"

namespace strokefit {

namespace {

using Results = std::vector<PropertyResult>;

// Scene seeds for property i of a group under the suite seed.
std::uint64_t case_seed(std::uint64_t suite_seed, std::uint64_t property, std::uint64_t i) {
  return CounterRng::mix(CounterRng::mix(suite_seed ^ (property << 32)) + i);
}

void add(Results& out, const std::string& group, const std::string& name, double measured,
         double threshold, bool strict = false) {
  const bool pass = std::isfinite(measured) && (strict ? measured < threshold : measured <= threshold);
  out.push_back({group, name, measured, threshold, pass});
}

double grads_max_abs(const StrokeGrads& g) {
  double m = 0.0;
  for (const auto& s : g) {
    for (const auto& p : s.d_points) m = std::max(m, p.cwiseAbs().maxCoeff());
    if (s.d_color.size() > 0) m = std::max(m, s.d_color.cwiseAbs().maxCoeff());
    m = std::max(m, std::abs(s.d_width));
  }
  return m;
}

double grads_diff(const StrokeGrads& a, const StrokeGrads& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    for (int k = 0; k < 4; ++k)
      m = std::max(m, (a[i].d_points[k] - b[i].d_points[k]).cwiseAbs().maxCoeff());
    if (a[i].d_color.size() > 0)
      m = std::max(m, (a[i].d_color - b[i].d_color).cwiseAbs().maxCoeff());
    m = std::max(m, std::abs(a[i].d_width - b[i].d_width));
  }
  return m;
}

Image random_image(const CanvasSpec& canvas, std::uint64_t seed, double lo, double hi) {
  CounterRng rng(seed, 0xad7);
  Image img(canvas);
  for (int ch = 0; ch < canvas.channels; ++ch)
    for (int r = 0; r < canvas.height; ++r)
      for (int c = 0; c < canvas.width; ++c) img(r, c, ch) = rng.next_uniform(lo, hi);
  return img;
}

AffineMap pixel_shift(const CanvasSpec& canvas, int dx, int dy) {
  return AffineMap::translate(2.0 * dx / canvas.width, 2.0 * dy / canvas.height);
}

std::vector<int> first_optimal_permutation(const CostMatrix<double>& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = assignment_cost(cost, perm);
  do best = std::min(best, assignment_cost(cost, perm));
  while (std::next_permutation(perm.begin(), perm.end()));
  const double tol = kAssignmentTieTolerance * (1.0 + std::abs(best));
  std::iota(perm.begin(), perm.end(), 0);
  do
    if (assignment_cost(cost, perm) <= best + tol) return perm;
  while (std::next_permutation(perm.begin(), perm.end()));
  return perm;
}

// ---------------------------------------------------------------- groups

// Smooth strokes that stay inside the canvas under the sampled similarities.
SceneOptions similarity_scene_options() {
  SceneOptions o;
  o.center_extent = 0.25;
  o.spread = 0.15;
  o.smooth = true;
  return o;
}

void gradients_group(std::uint64_t seed, Results& out) {
  const std::string g = "gradients";
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto s = case_seed(seed, 1, i);
    SceneOptions o;
    o.channels = i % 2 ? 3 : 1;
    const CanvasSpec canvas{32, 32, o.channels, i % 3 == 0 ? Topology::toroidal : Topology::planar};
    RenderConfig rc;
    rc.anneal_tau = (i % 4) / 3.0;
    if (i % 5 == 0) {
      rc.composition = Composition::over;
      rc.background = 0.25;
    }
    worst = std::max(worst, gradient_check_error(random_scene(s, o), canvas, rc, s));
  }
  add(out, g, "finite_difference_agreement", worst, 1e-3, true);

  double lin = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto s = case_seed(seed, 2, i);
    const CanvasSpec canvas{24, 24, 1, Topology::planar};
    const StrokeSet strokes = random_scene(s, {});
    const Image a = random_image(canvas, s, -1, 1);
    const Image b = random_image(canvas, s + 1, -1, 1);
    Image mix(canvas);
    mix.planes[0] = 0.7 * a.planes[0] - 1.3 * b.planes[0];
    const RenderConfig rc;
    const auto ga = render_with_grad(strokes, canvas, rc, a).grads;
    const auto gb = render_with_grad(strokes, canvas, rc, b).grads;
    const auto gm = render_with_grad(strokes, canvas, rc, mix).grads;
    StrokeGrads combo = ga;
    for (size_t k = 0; k < combo.size(); ++k) {
      for (int j = 0; j < 4; ++j)
        combo[k].d_points[j] = 0.7 * ga[k].d_points[j] - 1.3 * gb[k].d_points[j];
      combo[k].d_color = 0.7 * ga[k].d_color - 1.3 * gb[k].d_color;
      combo[k].d_width = 0.7 * ga[k].d_width - 1.3 * gb[k].d_width;
    }
    lin = std::max(lin, grads_diff(gm, combo) / (1.0 + grads_max_abs(gm)));
  }
  add(out, g, "adjoint_linearity", lin, 1e-10);

  {
    const CanvasSpec canvas{32, 32, 1, Topology::planar};
    Stroke s;
    s.points = {Point(-0.9, -0.9), Point(-0.85, -0.9), Point(-0.8, -0.85), Point(-0.8, -0.8)};
    s.color = Eigen::VectorXd::Constant(1, 0.2);
    s.width = 0.05;
    Image adj(canvas);
    adj(31, 31, 0) = 1.0;
    const auto grads = render_with_grad({s}, canvas, RenderConfig{}, adj).grads;
    add(out, g, "far_pixel_contribution", grads_max_abs(grads), 1e-9, true);
  }

  double shift = 0.0;
  for (int i = 0; i < 4; ++i) {
    const auto s = case_seed(seed, 3, i);
    const CanvasSpec canvas{32, 32, 1, Topology::toroidal};
    SceneOptions o;
    o.dyadic = true;
    const StrokeSet strokes = random_scene(s, o);
    const RenderConfig rc;
    const Image target = render(random_scene(s + 1, o), canvas, rc);
    const int dx = 1 + static_cast<int>(s % 13), dy = -3 + static_cast<int>((s >> 8) % 7);
    const AffineMap m = pixel_shift(canvas, dx, dy);
    const Image moved_target =
        transform_image(target, {m, Interpolation::nearest, Boundary::wrap});
    const MetricSpec metric;
    const auto a = augmented_loss_with_grad(metric, target, strokes, canvas, rc, 0).grads;
    const auto b = augmented_loss_with_grad(metric, moved_target, apply_affine_strokes(m, strokes),
                                            canvas, rc, 0)
                       .grads;
    shift = std::max(shift, grads_diff(a, b));
  }
  add(out, g, "torus_translation_consistency", shift, 1e-6);
}

void hungarian_group(std::uint64_t seed, Results& out) {
  const std::string g = "hungarian";
  int mismatches = 0, above_identity = 0;
  for (int i = 0; i < 60; ++i) {
    CounterRng rng(case_seed(seed, 10, i));
    const int n = 1 + i % 7;
    CostMatrix<double> cost(n, n);
    // Every third matrix has small integer costs, which produces many ties.
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        cost(r, c) = i % 3 == 0 ? std::floor(rng.next_uniform(0, 4)) : rng.next_uniform(0, 10);
    const Assignment a = hungarian(cost);
    const std::vector<int> oracle = first_optimal_permutation(cost);
    if (a.permutation != oracle || a.total_cost != assignment_cost(cost, oracle)) ++mismatches;
    std::vector<int> id(n);
    std::iota(id.begin(), id.end(), 0);
    if (a.total_cost > assignment_cost(cost, id)) ++above_identity;
  }
  add(out, g, "matches_enumeration", mismatches, 0);
  add(out, g, "at_most_identity_cost", above_identity, 0);
}

void guidance_group(std::uint64_t seed, Results& out) {
  const std::string g = "guidance";
  int mismatches = 0, perm_defects = 0, asym = 0;
  for (int i = 0; i < 30; ++i) {
    const auto s = case_seed(seed, 20, i);
    SceneOptions o;
    o.strokes = 1 + i % 5;
    o.channels = i % 2 ? 3 : 1;
    const StrokeSet pred = random_scene(s, o);
    const StrokeSet gt = random_scene(s + 1, o);
    const auto res = guidance_loss(pred, gt);

    const int n = o.strokes;
    CostMatrix<double> cost(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) cost(r, c) = stroke_l1(gt[r], pred[c]);
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do best = std::min(best, assignment_cost(cost, perm));
    while (std::next_permutation(perm.begin(), perm.end()));
    if (res.assignment.permutation != first_optimal_permutation(cost) ||
        std::abs(res.loss - best) > 1e-12 * (1.0 + best))
      ++mismatches;

    CounterRng rng(s, 3);
    StrokeSet shuffled = pred;
    for (int k = n - 1; k > 0; --k)
      std::swap(shuffled[k], shuffled[rng.next_bits() % static_cast<std::uint64_t>(k + 1)]);
    if (guidance_loss(shuffled, gt).loss != res.loss) ++perm_defects;
    if (guidance_loss(gt, pred).loss != res.loss) ++asym;
  }
  add(out, g, "matches_enumeration", mismatches, 0);
  add(out, g, "permutation_invariance", perm_defects, 0);
  add(out, g, "symmetry", asym, 0);
}

void equivariance_group(std::uint64_t seed, Results& out) {
  const std::string g = "equivariance";
  SceneOptions dyadic;
  dyadic.dyadic = true;
  const CanvasSpec torus{32, 32, 1, Topology::toroidal};
  const RenderConfig rc;

  double shift = 0.0, turn = 0.0;
  for (int i = 0; i < 8; ++i) {
    const auto s = case_seed(seed, 30, i);
    const StrokeSet strokes = random_scene(s, dyadic);
    const int dx = static_cast<int>(s % 31) - 15, dy = static_cast<int>((s >> 16) % 31) - 15;
    shift = std::max(shift, check_render_equivariance(strokes, pixel_shift(torus, dx, dy), torus, rc));
    turn = std::max(turn, check_render_equivariance(strokes, AffineMap::quarter_turns(1 + i % 3),
                                                    torus, rc));
  }
  add(out, g, "torus_translation_exact", shift, 0.0);
  add(out, g, "quarter_turn_exact", turn, 0.0);

  double sim = 0.0;
  const CanvasSpec big{128, 128, 1, Topology::planar};
  for (int i = 0; i < 3; ++i) {
    const auto s = case_seed(seed, 31, i);
    CounterRng rng(s, 5);
    const double angle = rng.next_uniform(-std::numbers::pi, std::numbers::pi);
    const AffineMap m = AffineMap::similarity(rng.next_uniform(0.9, 1.1), angle,
                                              rng.next_uniform(-0.1, 0.1),
                                              rng.next_uniform(-0.1, 0.1));
    sim = std::max(sim, check_render_equivariance(random_scene(s, similarity_scene_options()), m,
                                                  big, rc));
  }
  add(out, g, "similarity_defect", sim, 0.05, true);

  {
    const Image img = render(random_scene(case_seed(seed, 32, 0), {}), torus, rc);
    const AffineMap a = pixel_shift(torus, 3, -5) * AffineMap::quarter_turns(1);
    const AffineMap b = AffineMap::quarter_turns(3) * pixel_shift(torus, -7, 2);
    const auto tf = [](const Image& im, const AffineMap& m) {
      return transform_image(im, {m, Interpolation::bilinear, Boundary::wrap});
    };
    add(out, g, "group_law_permutation", tf(tf(img, b), a).max_abs_diff(tf(img, a * b)), 0.0);

    const CanvasSpec plane{128, 128, 1, Topology::planar};
    SceneOptions o = similarity_scene_options();
    o.min_width = 0.1;
    const Image smooth = render(random_scene(case_seed(seed, 32, 1), o), plane, rc);
    const AffineMap c = AffineMap::similarity(1.0, 0.3, 0.05, -0.02);
    const AffineMap d = AffineMap::similarity(1.0, -0.2, -0.03, 0.04);
    const auto tc = [](const Image& im, const AffineMap& m) {
      return transform_image(im, {m, Interpolation::bilinear, Boundary::clamp});
    };
    add(out, g, "group_law_bilinear", tc(tc(smooth, d), c).max_abs_diff(tc(smooth, c * d)), 2e-2,
        true);
  }

  double ratio = 0.0;
  for (int i = 0; i < 6; ++i) {
    const auto s = case_seed(seed, 33, i);
    const StrokeSet strokes = random_scene(s, dyadic);
    const Image target = render(random_scene(s + 1, dyadic), torus, rc);
    const AffineMap m = i % 2 ? AffineMap::quarter_turns(i) : pixel_shift(torus, 5 + i, -i);
    const auto [moved, base] = check_loss_condition(MetricSpec{}, target, strokes, m, torus, rc);
    ratio = std::max(ratio, std::abs(moved / base - 1.0));
  }
  add(out, g, "l1_loss_condition_ratio", ratio, 0.0);

  {
    const CanvasSpec canvas{32, 32, 1, Topology::planar};
    Stroke a, b;
    a.points = {Point(-0.8, -0.8), Point(-0.7, -0.6), Point(-0.5, -0.7), Point(-0.4, -0.5)};
    b.points = {Point(0.4, 0.5), Point(0.5, 0.7), Point(0.7, 0.6), Point(0.8, 0.8)};
    a.color = Eigen::VectorXd::Constant(1, 0.1);
    b.color = Eigen::VectorXd::Constant(1, 0.6);
    a.width = b.width = 0.05;
    const AffineMap m = AffineMap::similarity(1.0, 0.4, 0.02, -0.03);
    const double d1 = check_render_equivariance({a, b}, m, canvas, rc);
    const double d2 = check_render_equivariance({b, a}, m, canvas, rc);
    add(out, g, "defect_stable_under_disjoint_reorder", std::abs(d1 - d2), 1e-12);
  }
}

void losses_group(std::uint64_t seed, Results& out) {
  const std::string g = "losses";
  const auto stroke = [](std::array<Point, 4> p) {
    Stroke s;
    s.points = p;
    s.color = Eigen::VectorXd::Zero(1);
    return s;
  };
  int hand = 0;
  const CanvasSpec c4{4, 4, 1, Topology::planar};
  const Image zeros(c4, 0.0), ones(c4, 1.0);
  Image half = zeros;
  half.planes[0].topRows(2) = 0.5;
  hand += l1_image_loss(zeros, zeros) != 0.0;
  hand += l1_image_loss(zeros, ones) != 1.0;
  hand += l1_image_loss(zeros, half) != 0.25;
  const Point o(0, 0);
  hand += boundary_penalty({stroke({Point(1, -1), o, o, Point(-1, 1)})}) != 0.0;
  hand += boundary_penalty({stroke({Point(1.5, 0), o, o, o})}) != 0.5;
  hand += boundary_penalty({stroke({Point(1.5, 0), Point(0, -2), o, o})}) != 1.5;
  hand += align_penalty({stroke({Point(-0.3, 0), o, o, Point(0.2, 0)})}) != 0.0;
  hand += align_penalty({stroke({Point(0.2, 0), o, o, Point(-0.3, 0)})}) != 0.5;
  hand += align_penalty({stroke({Point(0.2, 0), o, o, Point(-0.3, 0)}),
                         stroke({Point(0.1, 0), o, o, Point(0.0, 0)})}) != 0.6;
  add(out, g, "tabulated_cases", hand, 0);

  const CanvasSpec torus{32, 32, 1, Topology::toroidal};
  const RenderConfig rc;
  int repeat = 0;
  double zero_samples = 0.0, isometry = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto s = case_seed(seed, 40, i);
    const StrokeSet strokes = random_scene(s, {});
    const Image target = render(random_scene(s + 1, {}), torus, rc);
    MetricSpec m;
    zero_samples = std::max(zero_samples, std::abs(augmented_loss(m, target, strokes, torus, rc, s) -
                                                   l1_image_loss(target, render(strokes, torus, rc))));
    m.augment_samples = 4;
    repeat += augmented_loss(m, target, strokes, torus, rc, s) !=
              augmented_loss(m, target, strokes, torus, rc, s);
    m.ranges.min_scale = m.ranges.max_scale = 1.0;
    const Image self = render(strokes, torus, rc);
    isometry = std::max(isometry, augmented_loss(m, self, strokes, torus, rc, s));
  }
  add(out, g, "augment_zero_samples_is_base_metric", zero_samples, 0.0);
  add(out, g, "augment_seed_determinism", repeat, 0);
  add(out, g, "augment_isometry_self_loss", isometry, 5e-2, true);

  int penalty_zero = 0;
  for (int i = 0; i < 50; ++i) {
    CounterRng rng(case_seed(seed, 41, i));
    Stroke s = stroke({});
    bool inside = true;
    for (auto& p : s.points) {
      p = Point(rng.next_uniform(-1.3, 1.3), rng.next_uniform(-1.3, 1.3));
      inside = inside && p.cwiseAbs().maxCoeff() <= 1.0;
    }
    if ((boundary_penalty({s}) == 0.0) != inside) ++penalty_zero;
  }
  add(out, g, "boundary_zero_iff_inside", penalty_zero, 0);
}

void init_group(std::uint64_t seed, Results& out) {
  const std::string g = "init";
  int closed = 0;
  for (double beta : {0.5, 5.0, 12.0}) {
    closed += adjust_color(0.0, beta) != 0.0;
    closed += adjust_color(0.5, beta) != 0.5;
    closed += adjust_color(1.0, beta) != 1.0;
  }
  add(out, g, "adjust_color_fixed_points", closed, 0);
  // High-precision evaluation of the closed form.
  add(out, g, "adjust_color_0.75", std::abs(adjust_color(0.75, 5.0) - 0.92989628345489184307),
      1e-9);

  int non_monotone = 0;
  double prev = adjust_color(0.0, 5.0);
  for (int k = 1; k <= 1000; ++k) {
    const double v = adjust_color(k / 1000.0, 5.0);
    non_monotone += !(v > prev);
    prev = v;
  }
  add(out, g, "adjust_color_monotone", non_monotone, 0);

  int nondet = 0, negative = 0;
  for (int i = 0; i < 3; ++i) {
    const auto s = case_seed(seed, 50, i);
    const CanvasSpec canvas{48, 40, i == 1 ? 3 : 1, Topology::planar};
    SceneOptions o;
    o.channels = canvas.channels;
    const Image img = render(random_scene(s, o), canvas, RenderConfig{});
    InitConfig cfg;
    cfg.n_strokes = 8;
    cfg.seed = s;
    const SaliencyMap sal = sobel_saliency(img);
    const auto a = greedy_init(sal, img, cfg).strokes;
    const auto b = greedy_init(sal, img, cfg).strokes;
    for (size_t k = 0; k < a.size(); ++k)
      nondet += a[k].points != b[k].points || a[k].color != b[k].color || a[k].width != b[k].width;
    negative += (sal.weights < 0.0).count();
  }
  add(out, g, "greedy_init_determinism", nondet, 0);
  add(out, g, "saliency_nonnegative", negative, 0);

  {
    const CanvasSpec canvas{40, 40, 1, Topology::planar};
    SaliencyMap sal{canvas, Plane::Zero(40, 40)};
    const int peaks[4][2] = {{5, 5}, {5, 34}, {34, 5}, {34, 34}};
    for (const auto& p : peaks) sal.weights(p[0], p[1]) = 1.0;
    InitConfig cfg;
    cfg.n_strokes = 4;
    cfg.seed = seed;
    const auto strokes = greedy_init(sal, Image(canvas, 0.7), cfg).strokes;
    int duplicates = 0;
    for (size_t a = 0; a < strokes.size(); ++a)
      for (size_t b = a + 1; b < strokes.size(); ++b)
        duplicates += strokes[a].points[0] == strokes[b].points[0];
    add(out, g, "separated_peaks_distinct", duplicates, 0);
  }
}

void geometry_group(std::uint64_t seed, Results& out) {
  const std::string g = "geometry";
  double endpoint = 0.0, dense = 0.0, reversal = 0.0, homomorphism = 0.0, isometry = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto s = case_seed(seed, 60, i);
    SceneOptions o;
    o.strokes = 1;
    const Stroke st = random_scene(s, o)[0];
    endpoint = std::max({endpoint, (bezier_point(st, 0.0) - st.points[0]).norm(),
                         (bezier_point(st, 1.0) - st.points[3]).norm()});
    CounterRng rng(s, 9);
    const Point u(rng.next_uniform(-1, 1), rng.next_uniform(-1, 1));
    const double d = stroke_distance(st, u, Topology::planar).distance;
    if (i < 5) {
      double best = INFINITY;
      for (int k = 0; k <= 100000; ++k) best = std::min(best, (bezier_point(st, k / 1e5) - u).norm());
      dense = std::max(dense, std::abs(d - best));
    }
    reversal = std::max(reversal, std::abs(d - stroke_distance(st.reversed(), u, Topology::planar).distance));

    const AffineMap a = AffineMap::similarity(rng.next_uniform(0.5, 2), rng.next_uniform(-3, 3),
                                              rng.next_uniform(-1, 1), rng.next_uniform(-1, 1));
    const AffineMap b = AffineMap::similarity(rng.next_uniform(0.5, 2), rng.next_uniform(-3, 3),
                                              rng.next_uniform(-1, 1), rng.next_uniform(-1, 1));
    const Stroke ab = apply_affine_stroke(a * b, st);
    const Stroke seq = apply_affine_stroke(a, apply_affine_stroke(b, st));
    for (int k = 0; k < 4; ++k) homomorphism = std::max(homomorphism, (ab.points[k] - seq.points[k]).norm());
    homomorphism = std::max(homomorphism, std::abs(ab.width - seq.width));

    const AffineMap iso = AffineMap::similarity(1.0, rng.next_uniform(-3, 3), rng.next_uniform(-1, 1),
                                                rng.next_uniform(-1, 1));
    isometry = std::max(isometry, std::abs(d - stroke_distance(apply_affine_stroke(iso, st), iso(u),
                                                               Topology::planar).distance));
  }
  add(out, g, "endpoint_interpolation", endpoint, 0.0);
  add(out, g, "distance_vs_dense_sampling", dense, 1e-4, true);
  add(out, g, "reversal_symmetry", reversal, 1e-12);
  add(out, g, "affine_homomorphism", homomorphism, 1e-12);
  add(out, g, "isometry_invariance", isometry, 1e-10);
}

// A degenerate stroke at distance d from the single pixel center of a 1x1
// canvas, with d chosen so its intensity is `alpha`.
Stroke stroke_with_alpha(double alpha, double color) {
  Stroke s;
  s.width = 0.1;
  const double d = s.width * std::sqrt(-std::log(alpha));
  s.points.fill(Point(d, 0.0));
  s.color = Eigen::VectorXd::Constant(1, color);
  return s;
}

void rasterizer_group(std::uint64_t seed, Results& out) {
  const std::string g = "rasterizer";
  const CanvasSpec one{1, 1, 1, Topology::planar};
  RenderConfig white, black;
  black.background = 0.0;
  const auto px = [&](const StrokeSet& s, const RenderConfig& rc) { return render(s, one, rc)(0, 0, 0); };
  double hand = 0.0;
  hand = std::max(hand, std::abs(px({stroke_with_alpha(0.6, 1.0)}, white) - 1.0));
  hand = std::max(hand, std::abs(px({stroke_with_alpha(0.6, 1.0)}, black) - 0.6));
  hand = std::max(hand, std::abs(px({stroke_with_alpha(0.6, 1.0), stroke_with_alpha(0.8, 0.5)}, black) - 0.76));
  add(out, g, "composition_hand_cases", hand, 1e-12);

  double occlusion = 0.0;
  for (int i = 0; i < 10; ++i) {
    CounterRng rng(case_seed(seed, 70, i));
    Stroke top = stroke_with_alpha(0.5, rng.next_uniform());
    top.points.fill(Point(0, 0));
    const Stroke below = stroke_with_alpha(rng.next_uniform(0.01, 0.99), rng.next_uniform());
    for (const auto& rc : {white, black})
      occlusion = std::max(occlusion, std::abs(px({top, below}, rc) - top.color[0]));
  }
  add(out, g, "occlusion", occlusion, 1e-5, true);

  double attenuation = 0.0, disjoint = 0.0, anneal = 0.0;
  const CanvasSpec canvas{32, 32, 1, Topology::planar};
  for (int i = 0; i < 4; ++i) {
    const auto s = case_seed(seed, 71, i);
    StrokeSet strokes = random_scene(s, {});
    const RenderConfig rc;
    const Image base = render(strokes, canvas, rc);
    const IntensityField top = stroke_field(strokes[0], canvas, rc);
    StrokeSet more = strokes;
    more.push_back(random_scene(s + 1, {})[0]);
    const Image extra = render(more, canvas, rc);
    for (int r = 0; r < canvas.height; ++r)
      for (int c = 0; c < canvas.width; ++c)
        if (top.alpha(r, c) >= rc.intensity_clamp)
          attenuation = std::max(attenuation, std::abs(extra(r, c, 0) - base(r, c, 0)));

    RenderConfig t0, t1;
    t0.anneal_tau = 0.5;
    t1.anneal_tau = 0.51;
    anneal = std::max(anneal, render(strokes, canvas, t0).max_abs_diff(render(strokes, canvas, t1)));
  }
  {
    Stroke a, b;
    a.points = {Point(-0.8, -0.8), Point(-0.7, -0.6), Point(-0.5, -0.7), Point(-0.4, -0.5)};
    b.points = {Point(0.4, 0.5), Point(0.5, 0.7), Point(0.7, 0.6), Point(0.8, 0.8)};
    a.color = Eigen::VectorXd::Constant(1, 0.2);
    b.color = Eigen::VectorXd::Constant(1, 0.7);
    a.width = b.width = 0.05;
    disjoint = render({a, b}, canvas, {}).max_abs_diff(render({b, a}, canvas, {}));
  }
  add(out, g, "monotone_attenuation", attenuation, 1e-5);
  add(out, g, "disjoint_permutation", disjoint, 1e-6, true);
  add(out, g, "anneal_continuity", anneal, 0.1, true);

  {
    SceneOptions o;
    o.strokes = 2;
    const StrokeSet strokes = random_scene(case_seed(seed, 72, 0), o);
    const CanvasSpec c{40, 30, 1, Topology::planar};
    int svg = 0;
    const std::string doc = export_svg(strokes, c);
    svg += doc != export_svg(strokes, c);
    size_t paths = 0;
    for (size_t p = doc.find("<path"); p != std::string::npos; p = doc.find("<path", p + 1)) ++paths;
    svg += paths != strokes.size();
    add(out, g, "svg_export", svg, 0);
  }
}

void optimizer_group(std::uint64_t seed, Results& out) {
  const std::string g = "optimizer";
  {
    AdamState st(1, 0.1);
    Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 1.0);
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd grad = 2.0 * x;
      adam_step(st, x, grad);
    }
    add(out, g, "adam_quadratic", std::abs(x[0]), 0.1, true);
  }

  const CanvasSpec canvas{32, 32, 1, Topology::planar};
  const StrokeSet init = random_scene(case_seed(seed, 80, 0), {});
  OptimizeConfig cfg;
  cfg.iterations = 20;
  cfg.checkpoints = {1, 5, 10, 20};
  cfg.lr = 0.05;
  cfg.anneal = false;
  cfg.lambda_p = 0.0;
  cfg.seed = seed;
  const Image target = render(init, canvas, cfg.render);
  const GuidanceTrace trace = optimize(target, init, cfg);
  double drift = 0.0;
  for (const auto& e : trace.entries)
    for (size_t i = 0; i < init.size(); ++i)
      for (int k = 0; k < 4; ++k)
        drift = std::max(drift, (e.strokes[i].points[k] - init[i].points[k]).cwiseAbs().maxCoeff());
  add(out, g, "fixed_point", drift, 1e-8, true);

  const GuidanceTrace parsed = parse_trace(serialize_trace(trace));
  int roundtrip = parsed.entries.size() != trace.entries.size();
  for (size_t k = 0; !roundtrip && k < trace.entries.size(); ++k) {
    roundtrip += parsed.entries[k].step != trace.entries[k].step;
    roundtrip += parsed.entries[k].loss != trace.entries[k].loss;
    for (size_t i = 0; i < init.size(); ++i)
      roundtrip += parsed.entries[k].strokes[i].points != trace.entries[k].strokes[i].points;
  }
  add(out, g, "trace_roundtrip", roundtrip, 0);

  const GuidanceTrace again = optimize(target, perturb_points(init, 0.05, seed), cfg);
  const GuidanceTrace again2 = optimize(target, perturb_points(init, 0.05, seed), cfg);
  add(out, g, "determinism", serialize_trace(again) != serialize_trace(again2), 0);
}

struct Group {
  std::string name;
  std::function<void(std::uint64_t, Results&)> run;
};

const std::vector<Group>& groups() {
  static const std::vector<Group> all{
      {"gradients", gradients_group},     {"hungarian", hungarian_group},
      {"guidance", guidance_group},       {"equivariance", equivariance_group},
      {"losses", losses_group},           {"init", init_group},
      {"geometry", geometry_group},       {"rasterizer", rasterizer_group},
      {"optimizer", optimizer_group},
  };
  return all;
}

}  // namespace

const std::vector<std::string>& property_groups() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& g : groups()) n.push_back(g.name);
    return n;
  }();
  return names;
}

std::vector<PropertyResult> run_property_suite(const VerifyOptions& options) {
  for (const auto& name : options.groups)
    if (std::find(property_groups().begin(), property_groups().end(), name) ==
        property_groups().end())
      throw ValidationError("unknown property group '" + name + "'");
  Results out;
  for (const auto& g : groups()) {
    if (!options.groups.empty() &&
        std::find(options.groups.begin(), options.groups.end(), g.name) == options.groups.end())
      continue;
    g.run(options.seed, out);
  }
  return out;
}

std::string property_report_json(const std::vector<PropertyResult>& results,
                                 const VerifyOptions& options) {
  nlohmann::ordered_json doc;
  doc["seed"] = options.seed;
  doc["groups"] = options.groups.empty() ? property_groups() : options.groups;
  bool all = true;
  auto& props = doc["properties"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    all = all && r.pass;
    props.push_back({{"group", r.group},
                     {"name", r.name},
                     {"measured", r.measured},
                     {"threshold", r.threshold},
                     {"pass", r.pass}});
  }
  doc["passed"] = std::count_if(results.begin(), results.end(), [](auto& r) { return r.pass; });
  doc["total"] = results.size();
  doc["all_pass"] = all;
  return doc.dump(2) + "\n";
}

double gradient_check_error(const StrokeSet& strokes, const CanvasSpec& canvas,
                            const RenderConfig& config, std::uint64_t adjoint_seed, double h,
                            double singular_radius) {
  const Plane mask = singular_pixel_mask(strokes, canvas, config, singular_radius);
  CounterRng rng(adjoint_seed, 7);
  Image adj(canvas);
  for (int ch = 0; ch < canvas.channels; ++ch)
    for (int r = 0; r < canvas.height; ++r)
      for (int c = 0; c < canvas.width; ++c)
        adj(r, c, ch) = mask(r, c) > 0 ? 0.0 : rng.next_uniform(-1, 1);
  const auto a = render_with_grad(strokes, canvas, config, adj).grads;
  const auto f = finite_diff_grad(strokes, canvas, config, adj, h);
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < strokes.size(); ++i) {
    for (int k = 0; k < 4; ++k) {
      num += (a[i].d_points[k] - f[i].d_points[k]).squaredNorm();
      den += f[i].d_points[k].squaredNorm();
    }
    num += (a[i].d_color - f[i].d_color).squaredNorm();
    den += f[i].d_color.squaredNorm();
    num += (a[i].d_width - f[i].d_width) * (a[i].d_width - f[i].d_width);
    den += f[i].d_width * f[i].d_width;
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : INFINITY;
  return std::sqrt(num / den);
}

}  // namespace strokefit
