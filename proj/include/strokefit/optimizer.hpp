#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "strokefit/adam.hpp"
#include "strokefit/geometry.hpp"
#include "strokefit/image.hpp"
#include "strokefit/losses.hpp"
#include "strokefit/rasterizer.hpp"

namespace strokefit {

struct OptimizeConfig {
  int iterations = 2000;
  std::vector<int> checkpoints{50, 100, 200, 400, 700, 1000, 1500, 2000};
  double lr = 1.0;
  MetricSpec metric;
  double metric_weight = 1.0;
  double lambda_p = 0.1;
  bool optimize_color = false;
  bool optimize_width = false;
  bool anneal = true;
  RenderConfig render;  // anneal_tau is overridden per step
  std::uint64_t seed = 0;
};

void validate(const OptimizeConfig& cfg);

struct TraceEntry {
  int step;
  StrokeSet strokes;
  double loss;
};

/// Step 0 (the initial strokes) followed by every checkpoint.
struct GuidanceTrace {
  CanvasSpec canvas;
  OptimizeConfig config;
  std::vector<TraceEntry> entries;

  const std::vector<int>& checkpoints() const { return config.checkpoints; }
  const TraceEntry& final_entry() const { return entries.back(); }
};

/// Adam on stroke parameters against `target`. Step k evaluates
///   metric_weight * metric + lambda_p * (boundary + align)
/// at anneal tau = k / iterations, records it if k is 0 or a checkpoint, then
/// updates. Colors and widths stay fixed unless enabled in cfg.
GuidanceTrace optimize(const Image& target, const StrokeSet& init, const OptimizeConfig& cfg);

}  // namespace strokefit
