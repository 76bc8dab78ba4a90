#pragma once

#include <cstdint>

#include "strokefit/geometry.hpp"
#include "strokefit/image.hpp"

namespace strokefit {

struct SaliencyMap {
  CanvasSpec canvas;  // channels == 1
  Plane weights;      // nonnegative
};

struct InitConfig {
  int n_strokes = 16;
  double sigma = 5.0;         // suppression radius, pixels
  double beta = 5.0;          // color contrast
  double perturb_std = 0.05;  // canvas units
  double stroke_width = 0.05;
  std::uint64_t seed = 0;
};

void validate(const InitConfig& cfg);

struct InitResult {
  StrokeSet strokes;
  bool uniform_fallback = false;  // saliency was all zero
};

/// Places strokes one at a time at the saliency argmax (row-major first on
/// ties), perturbs the remaining control points with seeded Gaussians, takes
/// the contrast-adjusted image color there, and suppresses the saliency by
/// I(u) exp(-|u - t1|^2 / sigma^2) in pixel units, clamped at 0.
InitResult greedy_init(const SaliencyMap& saliency, const Image& image, const InitConfig& cfg);

/// (sig((2c - 1) beta) - sig(-beta)) / (sig(beta) - sig(-beta)) per channel.
double adjust_color(double c, double beta);
Eigen::VectorXd adjust_color(const Eigen::VectorXd& c, double beta);

/// 3x3 Sobel gradient magnitude of the luminance with reflected borders,
/// scaled to a maximum of 1 (all zero for a constant image).
SaliencyMap sobel_saliency(const Image& image);

}  // namespace strokefit
