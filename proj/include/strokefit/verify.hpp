#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "strokefit/geometry.hpp"
#include "strokefit/rasterizer.hpp"

namespace strokefit {

struct PropertyResult {
  std::string group;
  std::string name;
  double measured;   // defect, error or failure count
  double threshold;  // pass bound for `measured`
  bool pass;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::vector<std::string> groups;  // empty: all groups
};

/// gradients, hungarian, guidance, equivariance, losses, init, geometry,
/// rasterizer, optimizer
const std::vector<std::string>& property_groups();

/// Runs the seeded property corpora. Throws ValidationError for an unknown group.
std::vector<PropertyResult> run_property_suite(const VerifyOptions& options);

std::string property_report_json(const std::vector<PropertyResult>& results,
                                 const VerifyOptions& options);

/// Norm-wise relative error ||analytic - fd|| / ||fd|| over all stroke
/// parameters, with a seeded uniform adjoint that is zero on pixels where the
/// curve distance is not smooth (see singular_pixel_mask).
double gradient_check_error(const StrokeSet& strokes, const CanvasSpec& canvas,
                            const RenderConfig& config, std::uint64_t adjoint_seed,
                            double h = 1e-4, double singular_radius = 1e-3);

}  // namespace strokefit
