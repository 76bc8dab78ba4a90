#include "strokefit/init.hpp"

#include <cmath>
#include <string>

#include "strokefit/random.hpp"

namespace strokefit {

namespace {

int reflect(int i, int n) {
  if (n == 1) return 0;
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

}  // namespace

void validate(const InitConfig& cfg) {
  if (cfg.n_strokes < 1) throw ValidationError("n_strokes must be >= 1");
  if (!(cfg.sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (!(cfg.beta > 0.0)) throw ValidationError("beta must be positive");
  if (!(cfg.perturb_std >= 0.0)) throw ValidationError("perturb_std must be nonnegative");
  if (!(cfg.stroke_width > 0.0 && cfg.stroke_width <= 1.0))
    throw ValidationError("stroke_width must lie in (0,1]");
}

double adjust_color(double c, double beta) {
  if (!(beta > 0.0)) throw ValidationError("beta must be positive");
  if (!(c >= 0.0 && c <= 1.0)) throw ValidationError("color component outside [0,1]");
  // logistic(x) - 1/2 == tanh(x/2)/2; this form keeps c = 0, 1/2, 1 exact.
  const double half = std::tanh(beta / 2.0);
  const double v = (std::tanh((2.0 * c - 1.0) * beta / 2.0) + half) / (2.0 * half);
  return std::clamp(v, 0.0, 1.0);
}

Eigen::VectorXd adjust_color(const Eigen::VectorXd& c, double beta) {
  Eigen::VectorXd out(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) out[i] = adjust_color(c[i], beta);
  return out;
}

InitResult greedy_init(const SaliencyMap& saliency, const Image& image, const InitConfig& cfg) {
  validate(cfg);
  const CanvasSpec& canvas = image.canvas;
  validate(canvas);
  validate_unit_range(image);
  if (saliency.weights.rows() != canvas.height || saliency.weights.cols() != canvas.width)
    throw ValidationError("saliency map is " + std::to_string(saliency.weights.cols()) + "x" +
                          std::to_string(saliency.weights.rows()) + ", image is " +
                          std::to_string(canvas.width) + "x" + std::to_string(canvas.height));
  if (!saliency.weights.allFinite() || saliency.weights.minCoeff() < 0.0)
    throw ValidationError("saliency weights must be finite and nonnegative");
  if (cfg.n_strokes > canvas.pixel_count())
    throw ValidationError("more strokes requested than pixels");

  InitResult result;
  result.uniform_fallback = saliency.weights.maxCoeff() <= 0.0;
  Plane weights = saliency.weights;
  const Plane intensity = luminance(image);
  const CounterRng rng(cfg.seed, /*stream=*/0x1417);
  const double inv_sigma2 = 1.0 / (cfg.sigma * cfg.sigma);
  const bool torus = canvas.topology == Topology::toroidal;

  for (int n = 0; n < cfg.n_strokes; ++n) {
    int best_r = 0, best_c = 0;
    for (int r = 0; r < canvas.height; ++r)
      for (int c = 0; c < canvas.width; ++c)
        if (weights(r, c) > weights(best_r, best_c)) {
          best_r = r;
          best_c = c;
        }

    Stroke s;
    s.points[0] = canvas.pixel_center(best_r, best_c);
    for (int k = 1; k < 4; ++k) {
      const std::uint64_t counter = 6 * static_cast<std::uint64_t>(n) + 2 * (k - 1);
      s.points[k] = s.points[0] + cfg.perturb_std * Point(rng.gaussian(counter),
                                                          rng.gaussian(counter + 1));
    }
    Eigen::VectorXd color(canvas.channels);
    for (int ch = 0; ch < canvas.channels; ++ch) color[ch] = image(best_r, best_c, ch);
    s.color = adjust_color(color, cfg.beta);
    s.width = cfg.stroke_width;
    result.strokes.push_back(std::move(s));

    for (int r = 0; r < canvas.height; ++r) {
      for (int c = 0; c < canvas.width; ++c) {
        double dr = std::abs(r - best_r);
        double dc = std::abs(c - best_c);
        if (torus) {
          dr = std::min(dr, canvas.height - dr);
          dc = std::min(dc, canvas.width - dc);
        }
        const double falloff = std::exp(-(dr * dr + dc * dc) * inv_sigma2);
        weights(r, c) = std::max(0.0, weights(r, c) - intensity(r, c) * falloff);
      }
    }
  }
  return result;
}

SaliencyMap sobel_saliency(const Image& image) {
  validate(image.canvas);
  const Plane lum = luminance(image);
  const int h = image.height();
  const int w = image.width();
  Plane mag(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      auto at = [&](int dr, int dc) { return lum(reflect(r + dr, h), reflect(c + dc, w)); };
      const double gx = (at(-1, 1) + 2.0 * at(0, 1) + at(1, 1)) -
                        (at(-1, -1) + 2.0 * at(0, -1) + at(1, -1));
      const double gy = (at(1, -1) + 2.0 * at(1, 0) + at(1, 1)) -
                        (at(-1, -1) + 2.0 * at(-1, 0) + at(-1, 1));
      mag(r, c) = std::sqrt(gx * gx + gy * gy);
    }
  }
  const double peak = mag.maxCoeff();
  if (peak > 0.0) mag /= peak;
  CanvasSpec canvas = image.canvas;
  canvas.channels = 1;
  return {canvas, mag};
}

}  // namespace strokefit
