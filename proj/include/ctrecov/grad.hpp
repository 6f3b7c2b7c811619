#pragma once

#include <span>
#include <vector>

#include "ctrecov/geometry.hpp"
#include "ctrecov/sparse.hpp"

namespace ctrecov {

// Forward-difference dictionary on the disk mask with Neumann boundary
// conditions. Row i (i < n) of diff_rows is the horizontal difference
// value(right) - value(pixel i); row n+i the vertical difference
// value(below) - value(pixel i). Differences across the mask boundary are
// kept as all-zero rows so the row count is exactly N = 2n.
struct AnisoGradOperator {
  DiskMask mask;
  SparseMat diff_rows;   // D^T, N x n
  SparseMat diff;        // D = (D^T)^T, n x N
  SparseMat laplacian;   // D D^T restricted to pixels: n x n graph Laplacian
  std::vector<int> boundary_rows;  // B: zero rows
  std::vector<int> interior_rows;  // B^c
  std::vector<int> edge_from;      // per row: pixel index, -1 on boundary rows
  std::vector<int> edge_to;        // per row: neighbor index, -1 on boundary
  std::vector<int> comp_id;        // connected component per pixel (full graph)
  std::vector<int> comp_size;
  int n_components = 0;

  int n() const { return mask.n; }
  int rows() const { return 2 * mask.n; }
};

AnisoGradOperator build_aniso(const DiskMask& mask);

// Isotropic grouping: group i pairs rows i and i+n of the anisotropic
// operator, r = n groups of size p = 2.
struct IsoGradOperator {
  AnisoGradOperator aniso;
  int groups() const { return aniso.n(); }
  static constexpr int group_size = 2;
};

IsoGradOperator build_iso(const DiskMask& mask);

struct GradientSupport {
  std::vector<int> indices;     // I, sorted ascending
  std::vector<int> complement;  // I^c, sorted ascending
  double tol = 0.0;
  int domain_size = 0;  // N for entrywise, r for group support
};

// I = { i : |z_i| > tol }
GradientSupport support_of(const Vec& z, double tol);

// I = { i : ||(z_i, z_{i+n})||_2 > tol }; z has length 2n in the row layout
// of the anisotropic operator.
GradientSupport group_support_of(const IsoGradOperator& op, const Vec& z,
                                 double tol);

// Rows {g, g+n} for each listed group.
std::vector<int> rows_of_groups(const IsoGradOperator& op,
                                std::span<const int> groups);

// Basis of ker(D^T restricted to rows in row_subset): 0/1 indicator columns
// of the connected components of the pixel graph whose edges are the
// interior rows in the subset. Exact and integer-valued.
SparseMat kernel_basis_restricted(const AnisoGradOperator& op,
                                  std::span<const int> row_subset);

// Basis of S = { v : (D^T v)_i = 0 for groups i not in I }.
SparseMat kernel_basis_groups(const IsoGradOperator& op,
                              std::span<const int> group_support);

// Minimum-norm least-squares solution of D^T x = target via conjugate
// gradients on the graph-Laplacian normal equations, with per-component
// constant deflation. Relative residual tolerance 1e-10, cap 10n iterations.
Vec pinv_apply(const AnisoGradOperator& op, const Vec& target);
Vec pinv_apply(const IsoGradOperator& op, const Vec& target);

// Orthogonal projection of v onto the range of D^T.
Vec range_project(const AnisoGradOperator& op, const Vec& v);

}  // namespace ctrecov
