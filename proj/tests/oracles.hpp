#pragma once

// Independent brute-force oracles used only by tests. Everything here is
// deliberately naive: dense factorizations, exhaustive enumeration, direct
// per-pixel computations.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ctrecov/sparse.hpp"

namespace oracles {

using ctrecov::Mat;
using ctrecov::Vec;

// Optimal value of  min c'x  s.t.  Aeq x = beq, G x <= h  by enumerating all
// basic feasible points (vertices). Requires a pointed feasible bounded
// polyhedron; returns nullopt when no feasible vertex exists.
inline std::optional<double> lp_vertex_optimum(const Vec& c, const Mat& aeq,
                                               const Vec& beq, const Mat& g,
                                               const Vec& h,
                                               double feas_tol = 1e-9) {
  const int n = static_cast<int>(c.size());
  const int p = static_cast<int>(aeq.rows());
  const int q = static_cast<int>(g.rows());
  const int need = n - p;
  if (need < 0) return std::nullopt;
  std::vector<int> pick(need);
  double best = std::numeric_limits<double>::infinity();
  bool found = false;

  const auto consider = [&](const std::vector<int>& rows) {
    Mat m(n, n);
    Vec rhs(n);
    m.topRows(p) = aeq;
    rhs.head(p) = beq;
    for (int i = 0; i < need; ++i) {
      m.row(p + i) = g.row(rows[i]);
      rhs(p + i) = h(rows[i]);
    }
    Eigen::FullPivLU<Mat> lu(m);
    if (!lu.isInvertible()) return;
    const Vec x = lu.solve(rhs);
    if (p > 0 && (aeq * x - beq).lpNorm<Eigen::Infinity>() > feas_tol) return;
    if (((g * x - h).array() > feas_tol).any()) return;
    found = true;
    best = std::min(best, c.dot(x));
  };

  // enumerate subsets of inequality rows of size `need`
  std::vector<int> idx(need);
  const std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == need) {
      consider(idx);
      return;
    }
    for (int i = start; i <= q - (need - depth); ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  if (need == 0)
    consider({});
  else
    rec(0, 0);
  if (!found) return std::nullopt;
  return best;
}

// Intersection length of the ray p + t*d, t >= 0, with an axis-aligned unit
// pixel centered at (cx, cy), by direct slab clipping.
inline double pixel_clip_length(double px, double py, double dx, double dy,
                                double cx, double cy) {
  double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
  const double p[2] = {px, py}, d[2] = {dx, dy}, c[2] = {cx, cy};
  for (int a = 0; a < 2; ++a) {
    const double lo = c[a] - 0.5, hi = c[a] + 0.5;
    if (std::abs(d[a]) < 1e-15) {
      if (p[a] <= lo || p[a] >= hi) return 0.0;
    } else {
      double ta = (lo - p[a]) / d[a];
      double tb = (hi - p[a]) / d[a];
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
    }
  }
  return std::max(0.0, t1 - t0);
}

// Orthonormal basis of the null space of a dense matrix.
inline Mat dense_nullspace(const Mat& m, double tol_scale = 1e-10) {
  if (m.rows() == 0) return Mat::Identity(m.cols(), m.cols());
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol =
      (sv.size() ? sv(0) : 0.0) * std::max(m.rows(), m.cols()) *
      std::numeric_limits<double>::epsilon() / 1e-16 * tol_scale;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

// Moore-Penrose pseudoinverse application via dense SVD.
inline Vec dense_pinv_apply(const Mat& m, const Vec& target) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double tol = (sv.size() ? sv(0) : 0.0) *
                     std::max(m.rows(), m.cols()) *
                     std::numeric_limits<double>::epsilon();
  Vec coef = svd.matrixU().transpose() * target;
  for (int i = 0; i < sv.size(); ++i)
    coef(i) = sv(i) > tol ? coef(i) / sv(i) : 0.0;
  return svd.matrixV() * coef;
}

}  // namespace oracles
