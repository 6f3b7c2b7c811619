#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/QR>

#include "ctrecov/grad.hpp"
#include "ctrecov/rng.hpp"
#include "oracles.hpp"

using namespace ctrecov;

namespace {

Vec random_vec(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.next_normal();
  return v;
}

// orthonormalize columns and return the projector residual ||P b - b||
double projection_residual(const Mat& basis, const Mat& other) {
  if (basis.cols() == 0) return other.norm();
  Eigen::HouseholderQR<Mat> qr(basis);
  const Mat q = qr.householderQ() * Mat::Identity(basis.rows(), basis.cols());
  return (other - q * (q.transpose() * other)).norm();
}

}  // namespace

TEST_CASE("row counts and boundary bookkeeping on disk masks") {
  for (int ns : {8, 32, 64}) {
    const AnisoGradOperator op = build_aniso(build_disk_mask(ns));
    CHECK(op.rows() == 2 * op.n());
    // convex mask: one missing horizontal difference per pixel row, one
    // missing vertical difference per pixel column
    CHECK(static_cast<int>(op.interior_rows.size()) == 2 * op.n() - 2 * ns);
  }
  const AnisoGradOperator op64 = build_aniso(build_disk_mask(64));
  CHECK(static_cast<int>(op64.interior_rows.size()) == 6328);
  CHECK(op64.n_components == 1);
}

TEST_CASE("interior rows hold one +1 and one -1 on neighbors") {
  const AnisoGradOperator op = build_aniso(build_disk_mask(7));
  const SparseMat rowmajor = op.diff_rows;
  std::vector<int> nnz(op.rows(), 0);
  std::vector<double> sum(op.rows(), 0.0);
  for (int k = 0; k < rowmajor.outerSize(); ++k)
    for (SparseMat::InnerIterator it(rowmajor, k); it; ++it) {
      ++nnz[it.row()];
      sum[it.row()] += it.value();
      CHECK(std::abs(it.value()) == 1.0);
    }
  for (int i : op.interior_rows) {
    CHECK(nnz[i] == 2);
    CHECK(sum[i] == 0.0);
  }
  for (int i : op.boundary_rows) CHECK(nnz[i] == 0);
}

TEST_CASE("constant images are in the kernel") {
  const AnisoGradOperator op = build_aniso(build_disk_mask(10));
  const Vec z = op.diff_rows * Vec::Constant(op.n(), 3.25);
  CHECK(z.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("differences match a direct per-pixel loop") {
  const DiskMask mask = build_disk_mask(4);
  const AnisoGradOperator op = build_aniso(mask);
  const Vec x = random_vec(mask.n, 5);
  const Vec z = op.diff_rows * x;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      const int j = mask.vec_index(r, c);
      if (j < 0) continue;
      const double dh =
          (c + 1 < 4 && mask.is_inside(r, c + 1))
              ? x(mask.vec_index(r, c + 1)) - x(j)
              : 0.0;
      const double dv =
          (r + 1 < 4 && mask.is_inside(r + 1, c))
              ? x(mask.vec_index(r + 1, c)) - x(j)
              : 0.0;
      CHECK(z(j) == doctest::Approx(dh).epsilon(1e-14));
      CHECK(z(j + mask.n) == doctest::Approx(dv).epsilon(1e-14));
    }
}

TEST_CASE("support extraction") {
  CHECK(support_of(Vec::Zero(6), 0.0).indices.empty());
  Vec z(4);
  z << 0, 3, -2, 0;
  const GradientSupport s = support_of(z, 0.0);
  CHECK(s.indices == std::vector<int>{1, 2});
  CHECK(s.complement == std::vector<int>{0, 3});
  CHECK_THROWS_AS(support_of(z, -1.0), InvalidArgument);
}

TEST_CASE("kernel bases via connected components") {
  const DiskMask mask = build_disk_mask(5);
  const AnisoGradOperator op = build_aniso(mask);

  SUBCASE("all rows active: only constants survive") {
    std::vector<int> all(op.rows());
    for (int i = 0; i < op.rows(); ++i) all[i] = i;
    const SparseMat k = kernel_basis_restricted(op, all);
    REQUIRE(k.cols() == 1);
    CHECK(Mat(k).col(0).isOnes());
  }
  SUBCASE("no rows: every pixel is its own component") {
    const SparseMat k = kernel_basis_restricted(op, std::vector<int>{});
    CHECK(k.cols() == op.n());
    CHECK(Mat(k).isIdentity());
  }
  SUBCASE("random subsets match the dense null-space oracle") {
    SplitMix64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<int> subset;
      for (int i = 0; i < op.rows(); ++i)
        if (rng.next_unit() < 0.5) subset.push_back(i);
      const SparseMat k = kernel_basis_restricted(op, subset);

      Mat restricted(static_cast<int>(subset.size()), op.n());
      restricted.setZero();
      const Mat dt = Mat(op.diff_rows);
      for (std::size_t i = 0; i < subset.size(); ++i)
        restricted.row(static_cast<int>(i)) = dt.row(subset[i]);
      const Mat null = oracles::dense_nullspace(restricted);
      REQUIRE(k.cols() == null.cols());
      CHECK(projection_residual(Mat(k), null) < 1e-8);
      CHECK(projection_residual(null, Mat(k)) < 1e-8);
    }
  }
}

TEST_CASE("group kernel basis constrains both rows of inactive groups") {
  const IsoGradOperator op = build_iso(build_disk_mask(5));
  // no active groups: kernel of the full gradient = constants
  const SparseMat k0 = kernel_basis_groups(op, std::vector<int>{});
  CHECK(k0.cols() == 1);
  // all groups active: S is everything
  std::vector<int> all(op.groups());
  for (int i = 0; i < op.groups(); ++i) all[i] = i;
  CHECK(kernel_basis_groups(op, all).cols() == op.aniso.n());
}

TEST_CASE("Gram identity over interior edges") {
  const AnisoGradOperator op = build_aniso(build_disk_mask(8));
  const Vec x = random_vec(op.n(), 21);
  const Vec z = op.diff_rows * x;
  double direct = 0.0;
  for (int i : op.interior_rows) {
    const double d = x(op.edge_to[i]) - x(op.edge_from[i]);
    direct += d * d;
  }
  CHECK(z.squaredNorm() == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("mixed-norm sandwich between isotropic and anisotropic TV") {
  const DiskMask mask = build_disk_mask(8);
  const AnisoGradOperator op = build_aniso(mask);
  const IsoGradOperator iso{op};
  for (int trial = 0; trial < 10; ++trial) {
    const Vec x = random_vec(op.n(), 100 + trial);
    const Vec z = op.diff_rows * x;
    const double atv = z.lpNorm<1>();
    double itv = 0.0;
    for (int i = 0; i < iso.groups(); ++i)
      itv += std::hypot(z(i), z(i + iso.groups()));
    CHECK(itv <= atv + 1e-12);
    CHECK(atv <= std::sqrt(2.0) * itv + 1e-12);
  }
}

TEST_CASE("pseudoinverse application") {
  const DiskMask mask = build_disk_mask(6);
  const AnisoGradOperator op = build_aniso(mask);

  SUBCASE("zero target gives the zero image") {
    CHECK(pinv_apply(op, Vec::Zero(op.rows())).norm() == 0.0);
  }
  SUBCASE("gradient targets invert up to the constant component") {
    const Vec y = random_vec(op.n(), 3);
    const Vec x = pinv_apply(op, op.diff_rows * y);
    const Vec centered = y.array() - y.mean();
    CHECK((x - centered).lpNorm<Eigen::Infinity>() < 1e-9);
  }
  SUBCASE("matches the dense SVD pseudoinverse") {
    const Mat dt = Mat(op.diff_rows);
    for (int trial = 0; trial < 5; ++trial) {
      const Vec target = random_vec(op.rows(), 50 + trial);
      const Vec got = pinv_apply(op, target);
      const Vec expect = oracles::dense_pinv_apply(dt, target);
      CHECK((got - expect).norm() < 1e-8 * (1.0 + expect.norm()));
    }
  }
  SUBCASE("Moore-Penrose idempotence on the range") {
    const Vec target = random_vec(op.rows(), 77);
    const Vec once = pinv_apply(op, target);
    const Vec twice = pinv_apply(op, op.diff_rows * once);
    CHECK((once - twice).norm() < 1e-8 * (1.0 + once.norm()));
  }
}

TEST_CASE("range projection") {
  const DiskMask mask = build_disk_mask(6);
  const AnisoGradOperator op = build_aniso(mask);

  SUBCASE("idempotent on range members") {
    const Vec v = op.diff_rows * random_vec(op.n(), 8);
    CHECK((range_project(op, v) - v).norm() < 1e-10 * (1.0 + v.norm()));
  }
  SUBCASE("vectors orthogonal to the range vanish") {
    Vec v = Vec::Zero(op.rows());
    REQUIRE(!op.boundary_rows.empty());
    v(op.boundary_rows[0]) = 1.0;  // zero rows never appear in the range
    CHECK(range_project(op, v).norm() < 1e-12);
  }
  SUBCASE("matches the dense projector") {
    const Mat dt = Mat(op.diff_rows);
    const Vec v = random_vec(op.rows(), 9);
    const Vec expect = dt * oracles::dense_pinv_apply(dt, v);
    CHECK((range_project(op, v) - expect).norm() < 1e-8);
  }
  SUBCASE("double application changes nothing") {
    const Vec v = random_vec(op.rows(), 10);
    const Vec p1 = range_project(op, v);
    const Vec p2 = range_project(op, p1);
    CHECK((p1 - p2).norm() < 1e-10 * (1.0 + p1.norm()));
  }
}
