#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "strokefit/errors.hpp"

namespace strokefit {

template <typename Scalar>
using CostMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Row i is matched to column permutation[i] (0-based).
template <typename Scalar>
struct BasicAssignment {
  std::vector<int> permutation;
  Scalar total_cost = Scalar(0);
};

using Assignment = BasicAssignment<double>;

/// Sum of cost(i, perm[i]) in row order.
template <typename Scalar>
Scalar assignment_cost(const CostMatrix<Scalar>& cost, const std::vector<int>& perm) {
  Scalar total = Scalar(0);
  for (size_t i = 0; i < perm.size(); ++i) total += cost(static_cast<Eigen::Index>(i), perm[i]);
  return total;
}

namespace detail {

// Shortest augmenting path with row/column potentials, O(n^3).
template <typename Scalar>
std::vector<int> solve_assignment(const CostMatrix<Scalar>& a) {
  const int n = static_cast<int>(a.rows());
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> u(n + 1, Scalar(0)), v(n + 1, Scalar(0));
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<Scalar> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      Scalar delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const Scalar cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> perm(n);
  for (int j = 1; j <= n; ++j) perm[p[j] - 1] = j - 1;
  return perm;
}

template <typename Scalar>
Scalar optimal_cost(const CostMatrix<Scalar>& a) {
  if (a.rows() == 0) return Scalar(0);
  return assignment_cost(a, solve_assignment(a));
}

}  // namespace detail

/// Relative slack under which two assignment totals count as tied.
inline constexpr double kAssignmentTieTolerance = 1e-9;

/// Minimum-cost perfect matching of a square cost matrix. Among optimal
/// matchings (totals within the tie tolerance) the lexicographically smallest
/// permutation is returned.
template <typename Scalar>
BasicAssignment<Scalar> hungarian(const CostMatrix<Scalar>& cost) {
  if (cost.rows() != cost.cols()) throw ValidationError("cost matrix must be square");
  if (!cost.allFinite()) throw ValidationError("cost matrix must be finite");
  const int n = static_cast<int>(cost.rows());
  BasicAssignment<Scalar> out;
  if (n == 0) return out;

  const Scalar best = detail::optimal_cost(cost);
  using std::abs;
  const Scalar tol = Scalar(kAssignmentTieTolerance) * (Scalar(1) + abs(best));

  // Fix rows in order, each to the smallest column that still admits an
  // optimal completion.
  std::vector<int> free_cols(n);
  for (int j = 0; j < n; ++j) free_cols[j] = j;
  Scalar prefix = Scalar(0);
  out.permutation.resize(n);
  for (int i = 0; i < n; ++i) {
    const int m = n - i - 1;
    bool fixed = false;
    for (size_t k = 0; k < free_cols.size(); ++k) {
      const int j = free_cols[k];
      Scalar rest = Scalar(0);
      if (m > 0) {
        CostMatrix<Scalar> sub(m, m);
        for (int r = 0; r < m; ++r) {
          int cc = 0;
          for (size_t q = 0; q < free_cols.size(); ++q) {
            if (q == k) continue;
            sub(r, cc++) = cost(i + 1 + r, free_cols[q]);
          }
        }
        rest = detail::optimal_cost(sub);
      }
      if (prefix + cost(i, j) + rest <= best + tol) {
        out.permutation[i] = j;
        prefix += cost(i, j);
        free_cols.erase(free_cols.begin() + static_cast<std::ptrdiff_t>(k));
        fixed = true;
        break;
      }
    }
    // Unreachable with exact arithmetic; fall back to the solver's choice.
    if (!fixed) {
      out.permutation = detail::solve_assignment(cost);
      break;
    }
  }
  out.total_cost = assignment_cost(cost, out.permutation);
  return out;
}

extern template BasicAssignment<double> hungarian<double>(const CostMatrix<double>&);

}  // namespace strokefit
