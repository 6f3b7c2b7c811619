#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ctrecov/imagegen.hpp"
#include "ctrecov/rng.hpp"

using namespace ctrecov;

TEST_CASE("generators are deterministic in the seed") {
  const DiskMask mask = build_disk_mask(12);
  const AnisoGradOperator op = build_aniso(mask);
  const MaskedImage a = gen_spikes(mask, 20, true, 42);
  const MaskedImage b = gen_spikes(mask, 20, true, 42);
  CHECK(a.values == b.values);  // bit-identical
  const MaskedImage c = gen_spikes(mask, 20, true, 43);
  CHECK(a.values != c.values);

  const MaskedImage t1 = gen_truncated_uniform(mask, op, 30, 10, 7);
  const MaskedImage t2 = gen_truncated_uniform(mask, op, 30, 10, 7);
  CHECK(t1.values == t2.values);

  const MaskedImage p1 = gen_altproj(op, 8, 11);
  const MaskedImage p2 = gen_altproj(op, 8, 11);
  CHECK(p1.values == p2.values);
}

TEST_CASE("spikes hit the exact nonzero count") {
  const DiskMask mask = build_disk_mask(16);
  CHECK(gen_spikes(mask, 0, false, 1).values.norm() == 0.0);
  const MaskedImage full = gen_spikes(mask, mask.n, false, 2);
  CHECK((full.values.array().abs() > 0.0).all());
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const long k = 37;
    const MaskedImage img = gen_spikes(mask, k, false, seed);
    CHECK((img.values.array().abs() > 0.0).count() == k);
    CHECK(img.values.minCoeff() >= 0.0);
    CHECK(img.values.maxCoeff() <= 1.0);
    const MaskedImage simg = gen_spikes(mask, k, true, seed);
    CHECK((simg.values.array().abs() > 0.0).count() == k);
    CHECK(simg.values.minCoeff() >= -1.0);
    CHECK(simg.values.minCoeff() < 0.0);  // signed draws go negative
  }
  CHECK_THROWS_AS(gen_spikes(mask, mask.n + 1, false, 1), InvalidArgument);
}

TEST_CASE("truncated-uniform degenerate and bound cases") {
  const DiskMask mask = build_disk_mask(16);
  const AnisoGradOperator op = build_aniso(mask);

  const MaskedImage zero = gen_truncated_uniform(mask, op, 0, 40, 5);
  CHECK((zero.values.array() == 0.5).all());
  CHECK((op.diff_rows * zero.values).lpNorm<Eigen::Infinity>() == 0.0);

  const double bc = static_cast<double>(op.interior_rows.size());
  const long kmax = static_cast<long>(std::floor(bc * 39.0 / 40.0));
  CHECK_NOTHROW(gen_truncated_uniform(mask, op, kmax, 40, 5));
  CHECK_THROWS_WITH_AS(gen_truncated_uniform(mask, op, kmax + 1, 40, 5),
                       doctest::Contains("exceeds"), InvalidArgument);
}

TEST_CASE("paper-scale truncated-uniform bound at n_side 64") {
  const DiskMask mask = build_disk_mask(64);
  const AnisoGradOperator op = build_aniso(mask);
  // |B^c| = 6328, F = 40: k up to 6169, relative sparsity 1.911
  const double bound = 6328.0 * 39.0 / 40.0;
  CHECK(static_cast<long>(std::floor(bound)) == 6169);
  CHECK(6169.0 / mask.n == doctest::Approx(1.911).epsilon(1e-3));
  CHECK_NOTHROW(gen_truncated_uniform(mask, op, 6169, 40, 1));
  CHECK_THROWS_AS(gen_truncated_uniform(mask, op, 6170, 40, 1),
                  InvalidArgument);
}

TEST_CASE("truncated-uniform expectation (small-scale Monte Carlo)") {
  const DiskMask mask = build_disk_mask(8);
  const AnisoGradOperator op = build_aniso(mask);
  const long bc = static_cast<long>(op.interior_rows.size());
  const long k = bc / 2;
  const int draws = 400;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const MaskedImage img =
        gen_truncated_uniform(mask, op, k, 5, derive_seed(900, i));
    const double nnz =
        static_cast<double>(((op.diff_rows * img.values).array().abs() > 1e-9)
                                .count());
    sum += nnz;
    sumsq += nnz * nnz;
  }
  const double mean = sum / draws;
  const double var = (sumsq - draws * mean * mean) / (draws - 1);
  const double se = std::sqrt(var / draws);
  CHECK(std::abs(mean - static_cast<double>(k)) <= 4.0 * se);
}

TEST_CASE("alternating projection reaches the exact target sparsity") {
  const DiskMask mask = build_disk_mask(8);
  const AnisoGradOperator op = build_aniso(mask);
  const IsoGradOperator iso{op};

  SUBCASE("k = 0 collapses to the zero image") {
    CHECK(gen_altproj(op, 0, 3).values.norm() == 0.0);
  }
  SUBCASE("anisotropic count is exact") {
    for (long k : {5L, 10L, 40L}) {
      const MaskedImage img = gen_altproj(op, k, 21 + k);
      const Vec z = op.diff_rows * img.values;
      CHECK((z.array().abs() > 1e-9).count() == k);
      CHECK(img.values.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
    }
  }
  SUBCASE("isotropic group count is exact") {
    for (long k : {5L, 10L}) {
      const MaskedImage img = gen_altproj(iso, k, 31 + k);
      const Vec z = op.diff_rows * img.values;
      long groups = 0;
      for (int i = 0; i < iso.groups(); ++i)
        if (std::hypot(z(i), z(i + iso.groups())) > 1e-9) ++groups;
      CHECK(groups == k);
    }
  }
  SUBCASE("impossible targets fail with a convergence error") {
    // vectors in the range vanish on boundary rows, so more nonzeros than
    // interior rows can never be reached
    const long impossible = static_cast<long>(op.interior_rows.size()) + 5;
    CHECK_THROWS_AS(gen_altproj(op, impossible, 1, 60, 2), ConvergenceError);
  }
}

TEST_CASE("nonnegative shift") {
  const DiskMask mask = build_disk_mask(8);
  const AnisoGradOperator op = build_aniso(mask);

  MaskedImage pos = gen_spikes(mask, 10, false, 9);
  const Vec before = pos.values;
  CHECK(to_nonneg(pos).values == before);  // already nonnegative

  MaskedImage two;
  two.values = Vec(2);
  two.values << -2.0, 1.0;
  const Vec shifted = to_nonneg(two).values;
  CHECK(shifted(0) == 0.0);
  CHECK(shifted(1) == 3.0);

  const MaskedImage ap = gen_altproj(op, 12, 13);
  const MaskedImage nn = to_nonneg(ap);
  CHECK(nn.cls == ImageClass::AltprojNonneg);
  CHECK(nn.values.minCoeff() == 0.0);
  const Vec za = op.diff_rows * ap.values;
  const Vec zn = op.diff_rows * nn.values;
  CHECK((za - zn).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((za.array().abs() > 1e-9).count() ==
        (zn.array().abs() > 1e-9).count());
}
