#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ctrecov/sparse.hpp"

namespace ctrecov {

// Standard-form conic program
//
//   minimize    c'x
//   subject to  A x = b
//               G x + s = h,   s in K
//
// where K is a nonnegative orthant followed by second-order cones
// { (t, u) : t >= ||u||_2 }. Box constraints |z| <= q are lowered to the two
// orthant rows z - q <= 0 and -z - q <= 0.
class ConicProgram {
 public:
  using Row = std::vector<std::pair<int, double>>;  // (variable, coefficient)

  int add_vars(int count);
  int num_vars() const { return nvar_; }

  void add_objective(int var, double coeff);

  // row . x = rhs
  void add_eq(const Row& row, double rhs);
  // row . x <= rhs
  void add_ineq(const Row& row, double rhs);
  // |row . x - offset| <= bound_var
  void add_abs_bound(const Row& row, double offset, int bound_var);
  // (rhs - rows.x) in SOC of dimension rows.size(); first row is the cone head
  void add_soc(const std::vector<Row>& rows, const std::vector<double>& rhs);

  // standard-form data (orthant rows first, then SOC blocks in order)
  const Vec& c() const;
  const SparseMat& eq_matrix() const;   // A
  const Vec& eq_rhs() const;            // b
  const SparseMat& cone_matrix() const; // G
  const Vec& cone_rhs() const;          // h
  int n_orthant() const { return n_orthant_; }
  const std::vector<int>& soc_dims() const { return soc_dims_; }
  int num_eq() const { return n_eq_; }
  int num_cone_rows() const { return n_orthant_ + n_soc_rows_; }

  // human-readable dump of the standard form, for external cross-checks
  void dump(const std::string& path) const;

 private:
  void invalidate() { built_ = false; }
  void build() const;
  void check_var(int v) const;

  int nvar_ = 0;
  int n_eq_ = 0;
  int n_orthant_ = 0;
  int n_soc_rows_ = 0;
  std::vector<std::pair<int, double>> obj_;
  std::vector<Triplet> eq_trip_;
  std::vector<double> eq_rhs_v_;
  std::vector<Triplet> orth_trip_;
  std::vector<double> orth_rhs_;
  std::vector<Triplet> soc_trip_;  // rows local to the SOC block region
  std::vector<double> soc_rhs_;
  std::vector<int> soc_dims_;

  mutable bool built_ = false;
  mutable Vec c_;
  mutable SparseMat a_;
  mutable Vec b_;
  mutable SparseMat g_;
  mutable Vec h_;
};

enum class SolveStatus {
  Optimal,
  PrimalInfeasible,
  DualInfeasible,
  NumericalFailure,
};

const char* solve_status_name(SolveStatus s);

struct SolverOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iters = 200;
  double static_reg = 1e-10;
  int dense_kkt_dim = 400;  // dense LU below this KKT dimension
  bool verbose = false;
};

struct SolverResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  Vec x;  // primal variables (Farkas ray when dual infeasible)
  Vec y;  // equality duals (Farkas certificate when primal infeasible)
  Vec z;  // cone duals
  Vec s;  // cone slacks
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double gap = 0.0;
  double rel_gap = 0.0;
  double primal_res = 0.0;
  double dual_res = 0.0;
  int iterations = 0;
  std::string message;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

// Homogeneous self-dual primal-dual path-following with Nesterov-Todd
// scaling and Mehrotra predictor-corrector steps.
SolverResult solve(const ConicProgram& prog, const SolverOptions& opts = {});

}  // namespace ctrecov
