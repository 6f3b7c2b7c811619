#include "ctrecov/conic.hpp"

#include <cstdio>

namespace ctrecov {

const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "primal-infeasible";
    case SolveStatus::DualInfeasible: return "dual-infeasible";
    case SolveStatus::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

int ConicProgram::add_vars(int count) {
  if (count < 0) throw InvalidArgument("negative variable count");
  const int first = nvar_;
  nvar_ += count;
  invalidate();
  return first;
}

void ConicProgram::check_var(int v) const {
  if (v < 0 || v >= nvar_)
    throw InvalidArgument("variable index out of range");
}

void ConicProgram::add_objective(int var, double coeff) {
  check_var(var);
  obj_.emplace_back(var, coeff);
  invalidate();
}

void ConicProgram::add_eq(const Row& row, double rhs) {
  for (const auto& [v, coef] : row) {
    check_var(v);
    eq_trip_.emplace_back(n_eq_, v, coef);
  }
  eq_rhs_v_.push_back(rhs);
  ++n_eq_;
  invalidate();
}

void ConicProgram::add_ineq(const Row& row, double rhs) {
  for (const auto& [v, coef] : row) {
    check_var(v);
    orth_trip_.emplace_back(n_orthant_, v, coef);
  }
  orth_rhs_.push_back(rhs);
  ++n_orthant_;
  invalidate();
}

void ConicProgram::add_abs_bound(const Row& row, double offset,
                                 int bound_var) {
  check_var(bound_var);
  Row upper = row;  // row.x - bound <= offset
  upper.emplace_back(bound_var, -1.0);
  add_ineq(upper, offset);
  Row lower;  // -row.x - bound <= -offset
  lower.reserve(row.size() + 1);
  for (const auto& [v, coef] : row) lower.emplace_back(v, -coef);
  lower.emplace_back(bound_var, -1.0);
  add_ineq(lower, -offset);
}

void ConicProgram::add_soc(const std::vector<Row>& rows,
                           const std::vector<double>& rhs) {
  if (rows.size() != rhs.size() || rows.size() < 2)
    throw InvalidArgument("SOC block needs matching rows/rhs, dimension >= 2");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [v, coef] : rows[r]) {
      check_var(v);
      soc_trip_.emplace_back(n_soc_rows_ + static_cast<int>(r), v, coef);
    }
    soc_rhs_.push_back(rhs[r]);
  }
  soc_dims_.push_back(static_cast<int>(rows.size()));
  n_soc_rows_ += static_cast<int>(rows.size());
  invalidate();
}

void ConicProgram::build() const {
  if (built_) return;
  c_ = Vec::Zero(nvar_);
  for (const auto& [v, coef] : obj_) c_(v) += coef;

  a_.resize(n_eq_, nvar_);
  a_.setFromTriplets(eq_trip_.begin(), eq_trip_.end());
  a_.makeCompressed();
  b_ = Eigen::Map<const Vec>(eq_rhs_v_.data(),
                             static_cast<long>(eq_rhs_v_.size()));

  std::vector<Triplet> gt = orth_trip_;
  gt.reserve(orth_trip_.size() + soc_trip_.size());
  for (const Triplet& t : soc_trip_)
    gt.emplace_back(t.row() + n_orthant_, t.col(), t.value());
  g_.resize(n_orthant_ + n_soc_rows_, nvar_);
  g_.setFromTriplets(gt.begin(), gt.end());
  g_.makeCompressed();
  h_.resize(n_orthant_ + n_soc_rows_);
  for (int i = 0; i < n_orthant_; ++i) h_(i) = orth_rhs_[i];
  for (int i = 0; i < n_soc_rows_; ++i) h_(n_orthant_ + i) = soc_rhs_[i];
  built_ = true;
}

const Vec& ConicProgram::c() const { build(); return c_; }
const SparseMat& ConicProgram::eq_matrix() const { build(); return a_; }
const Vec& ConicProgram::eq_rhs() const { build(); return b_; }
const SparseMat& ConicProgram::cone_matrix() const { build(); return g_; }
const Vec& ConicProgram::cone_rhs() const { build(); return h_; }

void ConicProgram::dump(const std::string& path) const {
  build();
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw InvalidArgument("cannot open for writing: " + path);
  std::fprintf(f, "conic-program vars %d eq %d orthant %d soc", nvar_, n_eq_,
               n_orthant_);
  for (int d : soc_dims_) std::fprintf(f, " %d", d);
  std::fprintf(f, "\nminimize\n");
  for (int i = 0; i < c_.size(); ++i)
    if (c_(i) != 0.0) std::fprintf(f, "  %d %.17g\n", i, c_(i));
  std::fprintf(f, "subject-to-eq (A x = b)\n");
  for (int k = 0; k < a_.outerSize(); ++k)
    for (SparseMat::InnerIterator it(a_, k); it; ++it)
      std::fprintf(f, "  %ld %ld %.17g\n", static_cast<long>(it.row()),
                   static_cast<long>(it.col()), it.value());
  for (int i = 0; i < b_.size(); ++i)
    std::fprintf(f, "  rhs %d %.17g\n", i, b_(i));
  std::fprintf(f, "subject-to-cone (G x + s = h, s in K)\n");
  for (int k = 0; k < g_.outerSize(); ++k)
    for (SparseMat::InnerIterator it(g_, k); it; ++it)
      std::fprintf(f, "  %ld %ld %.17g\n", static_cast<long>(it.row()),
                   static_cast<long>(it.col()), it.value());
  for (int i = 0; i < h_.size(); ++i)
    std::fprintf(f, "  rhs %d %.17g\n", i, h_(i));
  std::fclose(f);
}

}  // namespace ctrecov
