#include "ctrecov/grad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ctrecov {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  }
};

std::vector<int> complement_of(std::span<const int> sorted, int domain) {
  std::vector<int> out;
  out.reserve(domain - sorted.size());
  std::size_t p = 0;
  for (int i = 0; i < domain; ++i) {
    if (p < sorted.size() && sorted[p] == i)
      ++p;
    else
      out.push_back(i);
  }
  return out;
}

}  // namespace

AnisoGradOperator build_aniso(const DiskMask& mask) {
  AnisoGradOperator op;
  op.mask = mask;
  const int n = mask.n;
  const int ns = mask.n_side;
  const int rows = 2 * n;
  op.edge_from.assign(rows, -1);
  op.edge_to.assign(rows, -1);

  std::vector<Triplet> trip;
  trip.reserve(2 * rows);
  for (int i = 0; i < n; ++i) {
    const int g = mask.vec_to_grid[i];
    const int r = g / ns;
    const int c = g % ns;
    if (c + 1 < ns && mask.is_inside(r, c + 1)) {
      const int j = mask.vec_index(r, c + 1);
      trip.emplace_back(i, i, -1.0);
      trip.emplace_back(i, j, 1.0);
      op.edge_from[i] = i;
      op.edge_to[i] = j;
    }
    if (r + 1 < ns && mask.is_inside(r + 1, c)) {
      const int j = mask.vec_index(r + 1, c);
      trip.emplace_back(n + i, i, -1.0);
      trip.emplace_back(n + i, j, 1.0);
      op.edge_from[n + i] = i;
      op.edge_to[n + i] = j;
    }
  }
  op.diff_rows.resize(rows, n);
  op.diff_rows.setFromTriplets(trip.begin(), trip.end());
  op.diff_rows.makeCompressed();
  op.diff = op.diff_rows.transpose();
  op.laplacian = op.diff * op.diff_rows;
  op.laplacian.makeCompressed();

  for (int i = 0; i < rows; ++i) {
    if (op.edge_from[i] >= 0)
      op.interior_rows.push_back(i);
    else
      op.boundary_rows.push_back(i);
  }

  UnionFind uf(n);
  for (int i : op.interior_rows) uf.unite(op.edge_from[i], op.edge_to[i]);
  op.comp_id.assign(n, -1);
  std::vector<int> root_to_comp(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = uf.find(i);
    if (root_to_comp[r] < 0) {
      root_to_comp[r] = op.n_components++;
      op.comp_size.push_back(0);
    }
    op.comp_id[i] = root_to_comp[r];
    ++op.comp_size[op.comp_id[i]];
  }
  return op;
}

IsoGradOperator build_iso(const DiskMask& mask) {
  return IsoGradOperator{build_aniso(mask)};
}

GradientSupport support_of(const Vec& z, double tol) {
  if (tol < 0) throw InvalidArgument("support tolerance must be nonnegative");
  GradientSupport s;
  s.tol = tol;
  s.domain_size = static_cast<int>(z.size());
  for (int i = 0; i < z.size(); ++i)
    if (std::abs(z(i)) > tol) s.indices.push_back(i);
  s.complement = complement_of(s.indices, s.domain_size);
  return s;
}

GradientSupport group_support_of(const IsoGradOperator& op, const Vec& z,
                                 double tol) {
  if (tol < 0) throw InvalidArgument("support tolerance must be nonnegative");
  const int r = op.groups();
  if (z.size() != 2 * r)
    throw InvalidArgument("group vector has wrong length");
  GradientSupport s;
  s.tol = tol;
  s.domain_size = r;
  for (int i = 0; i < r; ++i)
    if (std::hypot(z(i), z(i + r)) > tol) s.indices.push_back(i);
  s.complement = complement_of(s.indices, s.domain_size);
  return s;
}

std::vector<int> rows_of_groups(const IsoGradOperator& op,
                                std::span<const int> groups) {
  const int r = op.groups();
  std::vector<int> rows;
  rows.reserve(2 * groups.size());
  for (int g : groups) {
    rows.push_back(g);
    rows.push_back(g + r);
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

SparseMat kernel_basis_restricted(const AnisoGradOperator& op,
                                  std::span<const int> row_subset) {
  const int n = op.n();
  UnionFind uf(n);
  for (int row : row_subset) {
    if (row < 0 || row >= op.rows())
      throw InvalidArgument("row index out of range in kernel basis");
    if (op.edge_from[row] >= 0) uf.unite(op.edge_from[row], op.edge_to[row]);
  }
  std::vector<int> root_to_comp(n, -1);
  int ncomp = 0;
  std::vector<Triplet> trip;
  trip.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int r = uf.find(i);
    if (root_to_comp[r] < 0) root_to_comp[r] = ncomp++;
    trip.emplace_back(i, root_to_comp[r], 1.0);
  }
  SparseMat k(n, ncomp);
  k.setFromTriplets(trip.begin(), trip.end());
  k.makeCompressed();
  return k;
}

SparseMat kernel_basis_groups(const IsoGradOperator& op,
                              std::span<const int> group_support) {
  const auto inactive =
      complement_of(group_support, op.groups());
  const auto rows = rows_of_groups(op, inactive);
  return kernel_basis_restricted(op.aniso, rows);
}

namespace {

// subtract the per-component mean so the vector is orthogonal to every
// component indicator
void deflate(const AnisoGradOperator& op, Vec& x) {
  Vec sums = Vec::Zero(op.n_components);
  for (int i = 0; i < x.size(); ++i) sums(op.comp_id[i]) += x(i);
  for (int c = 0; c < op.n_components; ++c) sums(c) /= op.comp_size[c];
  for (int i = 0; i < x.size(); ++i) x(i) -= sums(op.comp_id[i]);
}

}  // namespace

Vec pinv_apply(const AnisoGradOperator& op, const Vec& target) {
  if (target.size() != op.rows())
    throw InvalidArgument("pinv_apply target has wrong length");
  Vec rhs = op.diff * target;
  deflate(op, rhs);
  const double rhs_norm = rhs.norm();
  Vec x = Vec::Zero(op.n());
  if (rhs_norm == 0.0) return x;

  const double tol = 1e-10 * rhs_norm;
  const long max_iters = 10L * op.n();
  Vec r = rhs;
  Vec p = r;
  double rr = r.squaredNorm();
  double best = std::sqrt(rr);
  for (long it = 0; it < max_iters; ++it) {
    if (std::sqrt(rr) <= tol) {
      deflate(op, x);
      return x;
    }
    Vec ap = op.laplacian * p;
    deflate(op, ap);
    const double p_ap = p.dot(ap);
    if (p_ap <= 0.0) break;  // lost positive definiteness on the subspace
    const double alpha = rr / p_ap;
    x += alpha * p;
    r -= alpha * ap;
    deflate(op, r);
    const double rr_new = r.squaredNorm();
    best = std::min(best, std::sqrt(rr_new));
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  if (std::sqrt(rr) <= tol) {
    deflate(op, x);
    return x;
  }
  throw ConvergenceError("pinv_apply conjugate gradient did not converge",
                         best / rhs_norm);
}

Vec pinv_apply(const IsoGradOperator& op, const Vec& target) {
  return pinv_apply(op.aniso, target);
}

Vec range_project(const AnisoGradOperator& op, const Vec& v) {
  return op.diff_rows * pinv_apply(op, v);
}

}  // namespace ctrecov
