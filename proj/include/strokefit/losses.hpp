#pragma once

#include <cstdint>
#include <functional>

#include "strokefit/geometry.hpp"
#include "strokefit/gradients.hpp"
#include "strokefit/hungarian.hpp"
#include "strokefit/image.hpp"
#include "strokefit/rasterizer.hpp"

namespace strokefit {

/// Mean absolute difference over pixels and channels. Terms are summed in
/// sorted order, so the value is invariant under any pixel permutation.
double l1_image_loss(const Image& a, const Image& b);

/// d l1_image_loss(sketch, target) / d sketch, with sign(0) = 0.
Image l1_image_grad(const Image& sketch, const Image& target);

/// sum over strokes and control points of max(0, |t|_inf - 1)
double boundary_penalty(const StrokeSet& strokes);
/// sum over strokes of max(0, t1.x - t4.x)
double align_penalty(const StrokeSet& strokes);

/// Gradient of boundary_penalty + align_penalty (control points only).
StrokeGrads penalty_grad(const StrokeSet& strokes);

/// L1 distance between stroke parameters: control points and color, plus
/// width when include_width is set.
double stroke_l1(const Stroke& a, const Stroke& b, bool include_width = false);

struct GuidanceResult {
  double loss;
  Assignment assignment;  // gt stroke i <-> pred stroke assignment.permutation[i]
};

/// min over permutations sigma of sum_i stroke_l1(gt[i], pred[sigma(i)]). The
/// matched terms are summed in sorted order, so the value is exactly symmetric
/// and invariant under reordering either set.
GuidanceResult guidance_loss(const StrokeSet& pred, const StrokeSet& gt,
                             bool include_width = false);

enum class MetricKind { l1, external };

/// Random similarity maps x -> s R(theta) x + t used for augmentation.
struct AugmentRanges {
  double max_rotation_deg = 10.0;
  double max_translation = 0.1;  // canvas units, per axis
  double min_scale = 0.9;
  double max_scale = 1.1;
  bool snap_translation = false;  // round translations to whole pixels
};

/// Host-supplied image metric. Returns L(target, sketch); when sketch_grad is
/// non-null it must be filled with dL/dsketch.
using ExternalMetric =
    std::function<double(const Image& target, const Image& sketch, Image* sketch_grad)>;

struct MetricSpec {
  MetricKind kind = MetricKind::l1;
  int augment_samples = 0;
  AugmentRanges ranges;
  ExternalMetric external;
};

void validate(const MetricSpec& metric);

/// Unaugmented metric value (and optionally its sketch gradient).
double base_metric(const MetricSpec& metric, const Image& target, const Image& sketch,
                   Image* sketch_grad);

/// The maps used by augmented_loss for a given seed.
std::vector<AffineMap> sample_augmentations(const MetricSpec& metric, const CanvasSpec& canvas,
                                            std::uint64_t seed);

/// Mean of the base metric over sampled maps g applied to both the image
/// (resampled) and the strokes (transformed, then rendered). With zero
/// samples this is the base metric on (image, render(strokes)).
double augmented_loss(const MetricSpec& metric, const Image& image, const StrokeSet& strokes,
                      const CanvasSpec& canvas, const RenderConfig& config,
                      std::uint64_t seed);

struct LossWithGrad {
  double loss;
  StrokeGrads grads;
};

/// augmented_loss together with its gradient with respect to the untransformed strokes.
LossWithGrad augmented_loss_with_grad(const MetricSpec& metric, const Image& image,
                                      const StrokeSet& strokes, const CanvasSpec& canvas,
                                      const RenderConfig& config, std::uint64_t seed);

}  // namespace strokefit
