#pragma once

#include <functional>

#include "ctrecov/sparse.hpp"

namespace ctrecov {

// Singular-value cutoff given the largest singular value and the shape.
using RankTolPolicy = std::function<double(double sigma_max, long rows,
                                           long cols)>;

// sigma_max * max(rows, cols) * machine epsilon (the MATLAB/NumPy default)
RankTolPolicy default_rank_policy();

// Numerical rank. Dense SVD up to 5e6 entries, dense column-pivoted QR up to
// 2e7, sparse rank-revealing QR beyond that.
int numerical_rank(const SparseMat& m,
                   const RankTolPolicy& policy = default_rank_policy());
int numerical_rank(const Mat& m,
                   const RankTolPolicy& policy = default_rank_policy());

// True iff numerical rank equals the column count. Matrices with fewer rows
// than columns are rejected without factorization.
bool is_full_column_rank(const SparseMat& m,
                         const RankTolPolicy& policy = default_rank_policy());

}  // namespace ctrecov
