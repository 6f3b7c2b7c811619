#include "ctrecov/rank.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseQR>
#include <Eigen/OrderingMethods>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ctrecov {

RankTolPolicy default_rank_policy() {
  return [](double sigma_max, long rows, long cols) {
    return sigma_max * static_cast<double>(std::max(rows, cols)) *
           std::numeric_limits<double>::epsilon();
  };
}

namespace {

int rank_dense_svd(const Mat& d, const RankTolPolicy& policy) {
  Eigen::BDCSVD<Mat> svd(d);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double tol = policy(sv(0), d.rows(), d.cols());
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

// |R_ii| from a column-pivoted QR as singular-value proxies
int rank_dense_qr(const Mat& d, const RankTolPolicy& policy) {
  Eigen::ColPivHouseholderQR<Mat> qr(d);
  const Mat& r = qr.matrixR();
  const int k = static_cast<int>(std::min(d.rows(), d.cols()));
  if (k == 0) return 0;
  const double smax = std::abs(r(0, 0));
  const double tol = policy(smax, d.rows(), d.cols());
  int rank = 0;
  for (int i = 0; i < k; ++i)
    if (std::abs(r(i, i)) > tol) ++rank;
  return rank;
}

}  // namespace

int numerical_rank(const Mat& m, const RankTolPolicy& policy) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  const double entries = static_cast<double>(m.rows()) * m.cols();
  if (entries <= 5e6) return rank_dense_svd(m, policy);
  return rank_dense_qr(m, policy);
}

int numerical_rank(const SparseMat& m, const RankTolPolicy& policy) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  const double entries = static_cast<double>(m.rows()) * m.cols();
  if (entries <= 5e6) return rank_dense_svd(Mat(m), policy);
  if (entries <= 2e7) return rank_dense_qr(Mat(m), policy);
  Eigen::SparseQR<SparseMat, Eigen::COLAMDOrdering<int>> qr;
  qr.setPivotThreshold(1e-10);
  SparseMat mc = m;
  mc.makeCompressed();
  qr.compute(mc);
  return static_cast<int>(qr.rank());
}

bool is_full_column_rank(const SparseMat& m, const RankTolPolicy& policy) {
  if (m.cols() == 0) return true;
  if (m.rows() < m.cols()) return false;
  return numerical_rank(m, policy) == m.cols();
}

}  // namespace ctrecov
