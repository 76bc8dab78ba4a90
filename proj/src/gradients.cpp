#include "strokefit/gradients.hpp"

#include <algorithm>
#include <cmath>

#include "render_kernel.hpp"
#include "strokefit/parallel.hpp"

namespace strokefit {

StrokeGrad StrokeGrad::zero(int channels) {
  StrokeGrad g;
  for (auto& p : g.d_points) p.setZero();
  g.d_color = Eigen::VectorXd::Zero(channels);
  g.d_width = 0.0;
  return g;
}

StrokeGrad& StrokeGrad::operator+=(const StrokeGrad& other) {
  for (int k = 0; k < 4; ++k) d_points[k] += other.d_points[k];
  d_color += other.d_color;
  d_width += other.d_width;
  return *this;
}

namespace {

StrokeGrads zero_grads(const StrokeSet& strokes) {
  StrokeGrads g;
  g.reserve(strokes.size());
  for (const auto& s : strokes) g.push_back(StrokeGrad::zero(s.channels()));
  return g;
}

void check_adjoint(const CanvasSpec& canvas, const Image& adjoint) {
  if (adjoint.width() != canvas.width || adjoint.height() != canvas.height ||
      adjoint.channels() != canvas.channels)
    throw ValidationError("pixel adjoint shape does not match canvas");
  for (const auto& p : adjoint.planes)
    if (p.rows() != canvas.height || p.cols() != canvas.width)
      throw ValidationError("pixel adjoint plane does not match canvas");
}

// Scalar parameter view used by the finite-difference oracle.
double& param_ref(Stroke& s, int index) {
  if (index < 8) return s.points[index / 2][index % 2];
  if (index < 8 + s.channels()) return s.color[index - 8];
  return s.width;
}

double& grad_ref(StrokeGrad& g, int index, int channels) {
  if (index < 8) return g.d_points[index / 2][index % 2];
  if (index < 8 + channels) return g.d_color[index - 8];
  return g.d_width;
}

double weighted_sum(const Image& image, const Image& adjoint) {
  double total = 0.0;
  for (int ch = 0; ch < image.channels(); ++ch)
    total += (image.planes[ch] * adjoint.planes[ch]).sum();
  return total;
}

}  // namespace

RenderWithGrad render_with_adjoint_fn(const StrokeSet& strokes, const CanvasSpec& canvas,
                                      const RenderConfig& config, const PixelAdjointFn& adjoint) {
  validate(canvas);
  validate(config);
  validate(strokes, canvas.channels);

  RenderWithGrad result{Image(canvas), zero_grads(strokes)};
  const auto offsets = detail::subsample_offsets(canvas, config.supersample);
  const size_t nsub = offsets.size();
  const double weight = 1.0 / static_cast<double>(nsub);
  const int nc = canvas.channels;

  // One accumulator per row, reduced in row order so the result does not
  // depend on the thread count.
  std::vector<StrokeGrads> row_grads(canvas.height);
  parallel_for(canvas.height, [&](int row) {
    std::vector<detail::PixelWorkspace> ws(nsub);
    StrokeGrads acc = zero_grads(strokes);
    std::vector<double> pixel(nc), adj(nc);
    for (int col = 0; col < canvas.width; ++col) {
      const Point center = canvas.pixel_center(row, col);
      std::fill(pixel.begin(), pixel.end(), 0.0);
      for (size_t k = 0; k < nsub; ++k) {
        detail::forward_sample(strokes, center + offsets[k], canvas, config, ws[k]);
        for (int ch = 0; ch < nc; ++ch) pixel[ch] += ws[k].out[ch];
      }
      if (nsub > 1)
        for (int ch = 0; ch < nc; ++ch) pixel[ch] *= weight;
      for (int ch = 0; ch < nc; ++ch) result.image(row, col, ch) = pixel[ch];
      adjoint(row, col, pixel.data(), adj.data());
      for (size_t k = 0; k < nsub; ++k)
        detail::backward_sample(strokes, canvas, config, ws[k], adj.data(), weight, acc);
    }
    row_grads[row] = std::move(acc);
  });
  for (const auto& rg : row_grads)
    for (size_t i = 0; i < strokes.size(); ++i) result.grads[i] += rg[i];
  return result;
}

RenderWithGrad render_with_grad(const StrokeSet& strokes, const CanvasSpec& canvas,
                                const RenderConfig& config, const Image& pixel_adjoint) {
  check_adjoint(canvas, pixel_adjoint);
  return render_with_adjoint_fn(
      strokes, canvas, config, [&](int row, int col, const double*, double* adj) {
        for (int ch = 0; ch < canvas.channels; ++ch) adj[ch] = pixel_adjoint(row, col, ch);
      });
}

StrokeGrads finite_diff_grad(const StrokeSet& strokes, const CanvasSpec& canvas,
                             const RenderConfig& config, const Image& pixel_adjoint, double h) {
  if (!(h > 0.0)) throw ValidationError("finite-difference step must be positive");
  validate(canvas);
  validate(config);
  validate(strokes, canvas.channels);
  check_adjoint(canvas, pixel_adjoint);

  StrokeGrads grads = zero_grads(strokes);
  StrokeSet work = strokes;
  for (size_t i = 0; i < strokes.size(); ++i) {
    const int nparams = 8 + strokes[i].channels() + 1;
    for (int p = 0; p < nparams; ++p) {
      double& x = param_ref(work[i], p);
      const double x0 = x;
      // Colors stay inside [0,1]: one-sided there, which is exact since the
      // composite is linear in color.
      const bool is_color = p >= 8 && p < 8 + strokes[i].channels();
      const double hi = is_color && x0 + h > 1.0 ? x0 : x0 + h;
      const double lo = is_color && x0 - h < 0.0 ? x0 : x0 - h;
      x = hi;
      const double up = weighted_sum(detail::render_unchecked(work, canvas, config), pixel_adjoint);
      x = lo;
      const double down =
          weighted_sum(detail::render_unchecked(work, canvas, config), pixel_adjoint);
      x = x0;
      grad_ref(grads[i], p, strokes[i].channels()) = (up - down) / (hi - lo);
    }
  }
  return grads;
}

Plane singular_pixel_mask(const StrokeSet& strokes, const CanvasSpec& canvas,
                          const RenderConfig& config, double radius) {
  Plane mask = Plane::Zero(canvas.height, canvas.width);
  const auto offsets = detail::subsample_offsets(canvas, config.supersample);
  const int reach = canvas.topology == Topology::toroidal ? 1 : 0;
  for (int row = 0; row < canvas.height; ++row) {
    for (int col = 0; col < canvas.width; ++col) {
      for (const auto& off : offsets) {
        const Point u = canvas.pixel_center(row, col) + off;
        for (const auto& s : strokes) {
          const auto rel = relative_points(ControlPoints<double>(s.points), u, canvas.topology);
          std::vector<double> dists;
          for (int oy = -reach; oy <= reach; ++oy)
            for (int ox = -reach; ox <= reach; ++ox) {
              ControlPoints<double> copy = rel;
              for (auto& q : copy) q += Point(ox * kTorusPeriod, oy * kTorusPeriod);
              for (const auto& proj : local_projections(copy))
                dists.push_back(std::sqrt(proj.dist2));
            }
          std::sort(dists.begin(), dists.end());
          if (dists.front() < radius || (dists.size() > 1 && dists[1] - dists[0] < radius))
            mask(row, col) = 1.0;
        }
      }
    }
  }
  return mask;
}

}  // namespace strokefit
