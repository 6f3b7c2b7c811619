#include "ctrecov/recon.hpp"

#include <chrono>

namespace ctrecov {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// equality block A x = b over the x variables starting at index x0
void add_data_constraints(ConicProgram& prog, const SparseMat& a, const Vec& b,
                          int x0) {
  const SparseMat ar = a.transpose();  // column k of ar = row k of a
  for (int i = 0; i < ar.outerSize(); ++i) {
    ConicProgram::Row row;
    for (SparseMat::InnerIterator it(ar, i); it; ++it)
      row.emplace_back(x0 + static_cast<int>(it.row()), it.value());
    prog.add_eq(row, b(i));
  }
}

}  // namespace

const char* prior_name(Prior p) {
  switch (p) {
    case Prior::L1: return "l1";
    case Prior::ATV: return "atv";
    case Prior::ITV: return "itv";
  }
  return "?";
}

Prior prior_from_name(const std::string& name) {
  if (name == "l1") return Prior::L1;
  if (name == "atv") return Prior::ATV;
  if (name == "itv") return Prior::ITV;
  throw InvalidArgument("unknown prior: " + name);
}

double default_recovery_epsilon(Prior p) {
  return p == Prior::ITV ? 1e-3 : 1e-4;
}

ReconResult reconstruct_l1(const SparseMat& a, const Vec& b,
                           const SolverOptions& opts) {
  if (b.size() != a.rows())
    throw InvalidArgument("data length does not match matrix rows");
  const auto t0 = Clock::now();
  const int n = static_cast<int>(a.cols());
  ConicProgram prog;
  const int x = prog.add_vars(n);
  const int q = prog.add_vars(n);
  for (int j = 0; j < n; ++j) prog.add_objective(q + j, 1.0);
  add_data_constraints(prog, a, b, x);
  for (int j = 0; j < n; ++j)
    prog.add_abs_bound({{x + j, 1.0}}, 0.0, q + j);

  ReconResult res;
  res.solver = solve(prog, opts);
  res.x = res.solver.x.size() ? Vec(res.solver.x.head(n)) : Vec::Zero(n);
  res.wall_seconds = seconds_since(t0);
  return res;
}

ReconResult reconstruct_atv(const SparseMat& a, const AnisoGradOperator& op,
                            const Vec& b, const SolverOptions& opts) {
  if (b.size() != a.rows())
    throw InvalidArgument("data length does not match matrix rows");
  if (a.cols() != op.n())
    throw InvalidArgument("matrix and gradient operator disagree on n");
  const auto t0 = Clock::now();
  const int n = op.n();
  const int nrows = op.rows();
  ConicProgram prog;
  const int x = prog.add_vars(n);
  const int q = prog.add_vars(nrows);
  for (int i = 0; i < nrows; ++i) prog.add_objective(q + i, 1.0);
  add_data_constraints(prog, a, b, x);
  // |(D^T x)_i| <= q_i; boundary rows reduce to 0 <= q_i
  for (int i = 0; i < nrows; ++i) {
    ConicProgram::Row row;
    if (op.edge_from[i] >= 0) {
      row.emplace_back(x + op.edge_from[i], -1.0);
      row.emplace_back(x + op.edge_to[i], 1.0);
    }
    prog.add_abs_bound(row, 0.0, q + i);
  }

  ReconResult res;
  res.solver = solve(prog, opts);
  res.x = res.solver.x.size() ? Vec(res.solver.x.head(n)) : Vec::Zero(n);
  res.wall_seconds = seconds_since(t0);
  return res;
}

ReconResult reconstruct_itv(const SparseMat& a, const IsoGradOperator& op,
                            const Vec& b, const SolverOptions& opts) {
  if (b.size() != a.rows())
    throw InvalidArgument("data length does not match matrix rows");
  if (a.cols() != op.aniso.n())
    throw InvalidArgument("matrix and gradient operator disagree on n");
  const auto t0 = Clock::now();
  const int n = op.aniso.n();
  const int r = op.groups();
  ConicProgram prog;
  const int x = prog.add_vars(n);
  const int q = prog.add_vars(r);
  for (int j = 0; j < r; ++j) prog.add_objective(q + j, 1.0);
  add_data_constraints(prog, a, b, x);
  for (int j = 0; j < r; ++j) {
    std::vector<ConicProgram::Row> rows(3);
    rows[0] = {{q + j, -1.0}};
    for (int half = 0; half < 2; ++half) {
      const int drow = j + half * r;
      if (op.aniso.edge_from[drow] >= 0) {
        rows[1 + half] = {{x + op.aniso.edge_from[drow], 1.0},
                          {x + op.aniso.edge_to[drow], -1.0}};
      }
    }
    prog.add_soc(rows, {0.0, 0.0, 0.0});
  }

  ReconResult res;
  res.solver = solve(prog, opts);
  res.x = res.solver.x.size() ? Vec(res.solver.x.head(n)) : Vec::Zero(n);
  res.wall_seconds = seconds_since(t0);
  return res;
}

RecoveryDecision decide_recovery(const Vec& xhat, const Vec& xstar,
                                 double epsilon) {
  if (xhat.size() != xstar.size())
    throw InvalidArgument("recovery comparison size mismatch");
  RecoveryDecision d;
  d.epsilon = epsilon;
  const double ref = xstar.norm();
  d.relative_error = ref > 0 ? (xhat - xstar).norm() / ref : xhat.norm();
  d.recovered = d.relative_error < epsilon;
  return d;
}

}  // namespace ctrecov
