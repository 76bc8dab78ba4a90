#include "strokefit/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "strokefit/random.hpp"

namespace strokefit {

namespace {

constexpr double kMinWidth = 1e-4;

int params_per_stroke(const Stroke& s, const OptimizeConfig& cfg) {
  return 8 + (cfg.optimize_color ? s.channels() : 0) + (cfg.optimize_width ? 1 : 0);
}

Eigen::VectorXd pack(const StrokeSet& strokes, const OptimizeConfig& cfg) {
  Eigen::Index size = 0;
  for (const auto& s : strokes) size += params_per_stroke(s, cfg);
  Eigen::VectorXd x(size);
  Eigen::Index k = 0;
  for (const auto& s : strokes) {
    for (const auto& p : s.points) {
      x[k++] = p.x();
      x[k++] = p.y();
    }
    if (cfg.optimize_color)
      for (Eigen::Index c = 0; c < s.color.size(); ++c) x[k++] = s.color[c];
    if (cfg.optimize_width) x[k++] = s.width;
  }
  return x;
}

Eigen::VectorXd pack(const StrokeGrads& grads, const OptimizeConfig& cfg) {
  Eigen::Index size = 0;
  for (const auto& g : grads)
    size += 8 + (cfg.optimize_color ? g.d_color.size() : 0) + (cfg.optimize_width ? 1 : 0);
  Eigen::VectorXd x(size);
  Eigen::Index k = 0;
  for (const auto& g : grads) {
    for (const auto& p : g.d_points) {
      x[k++] = p.x();
      x[k++] = p.y();
    }
    if (cfg.optimize_color)
      for (Eigen::Index c = 0; c < g.d_color.size(); ++c) x[k++] = g.d_color[c];
    if (cfg.optimize_width) x[k++] = g.d_width;
  }
  return x;
}

void unpack(const Eigen::VectorXd& x, const OptimizeConfig& cfg, StrokeSet& strokes) {
  Eigen::Index k = 0;
  for (auto& s : strokes) {
    for (auto& p : s.points) {
      p.x() = x[k++];
      p.y() = x[k++];
    }
    if (cfg.optimize_color)
      for (Eigen::Index c = 0; c < s.color.size(); ++c) s.color[c] = std::clamp(x[k++], 0.0, 1.0);
    if (cfg.optimize_width) s.width = std::clamp(x[k++], kMinWidth, 1.0);
  }
}

}  // namespace

void validate(const OptimizeConfig& cfg) {
  if (cfg.iterations < 1) throw ValidationError("iterations must be >= 1");
  if (cfg.checkpoints.empty()) throw ValidationError("checkpoint list is empty");
  for (size_t i = 0; i < cfg.checkpoints.size(); ++i) {
    const int c = cfg.checkpoints[i];
    if (c < 1 || c > cfg.iterations)
      throw ValidationError("checkpoint " + std::to_string(c) + " outside [1, iterations]");
    if (i > 0 && c <= cfg.checkpoints[i - 1])
      throw ValidationError("checkpoints must be strictly increasing");
  }
  if (!(cfg.lr > 0.0)) throw ValidationError("learning rate must be positive");
  if (!(cfg.lambda_p >= 0.0)) throw ValidationError("lambda_p must be nonnegative");
  if (!(cfg.metric_weight >= 0.0)) throw ValidationError("metric_weight must be nonnegative");
  validate(cfg.metric);
  validate(cfg.render);
}

GuidanceTrace optimize(const Image& target, const StrokeSet& init, const OptimizeConfig& cfg) {
  validate(cfg);
  const CanvasSpec& canvas = target.canvas;
  validate(canvas);
  validate_unit_range(target);
  validate(init, canvas.channels);

  GuidanceTrace trace{canvas, cfg, {}};
  StrokeSet strokes = init;
  Eigen::VectorXd params = pack(strokes, cfg);
  AdamState adam(params.size(), cfg.lr);

  size_t next_checkpoint = 0;
  for (int step = 0; step <= cfg.iterations; ++step) {
    RenderConfig rc = cfg.render;
    rc.anneal_tau = cfg.anneal ? static_cast<double>(step) / cfg.iterations : 1.0;

    LossWithGrad metric{0.0, {}};
    if (cfg.metric_weight > 0.0) {
      metric = augmented_loss_with_grad(cfg.metric, target, strokes, canvas, rc,
                                        CounterRng::mix(cfg.seed ^ CounterRng::mix(step)));
    } else {
      for (const auto& s : strokes) metric.grads.push_back(StrokeGrad::zero(s.channels()));
    }
    const double penalty = boundary_penalty(strokes) + align_penalty(strokes);
    const double loss = cfg.metric_weight * metric.loss + cfg.lambda_p * penalty;
    if (!std::isfinite(loss))
      throw NumericalError("non-finite loss at step " + std::to_string(step), step);

    const bool record = step == 0 || (next_checkpoint < cfg.checkpoints.size() &&
                                      cfg.checkpoints[next_checkpoint] == step);
    if (record) {
      trace.entries.push_back({step, strokes, loss});
      if (step != 0) ++next_checkpoint;
    }
    if (step == cfg.iterations) break;

    Eigen::VectorXd grad = cfg.metric_weight * pack(metric.grads, cfg);
    if (cfg.lambda_p > 0.0) grad += cfg.lambda_p * pack(penalty_grad(strokes), cfg);
    if (!grad.allFinite())
      throw NumericalError("non-finite gradient at step " + std::to_string(step), step);
    adam_step(adam, params, grad);
    unpack(params, cfg, strokes);
    // Clamped values feed back so params never drift outside the invariants.
    params = pack(strokes, cfg);
  }
  return trace;
}

}  // namespace strokefit
