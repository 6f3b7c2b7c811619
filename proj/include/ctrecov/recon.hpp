#pragma once

#include <string>

#include "ctrecov/conic.hpp"
#include "ctrecov/grad.hpp"

namespace ctrecov {

enum class Prior { L1, ATV, ITV };

const char* prior_name(Prior p);
Prior prior_from_name(const std::string& name);

struct ReconResult {
  Vec x;
  SolverResult solver;
  double wall_seconds = 0.0;
};

// min ||x||_1            s.t. A x = b
ReconResult reconstruct_l1(const SparseMat& a, const Vec& b,
                           const SolverOptions& opts = {});
// min ||D^T x||_1        s.t. A x = b
ReconResult reconstruct_atv(const SparseMat& a, const AnisoGradOperator& op,
                            const Vec& b, const SolverOptions& opts = {});
// min ||D^T x||_{1,2}    s.t. A x = b
ReconResult reconstruct_itv(const SparseMat& a, const IsoGradOperator& op,
                            const Vec& b, const SolverOptions& opts = {});

struct RecoveryDecision {
  double relative_error = 0.0;
  bool recovered = false;
  double epsilon = 0.0;
};

// Strict relative-error test; a zero ground truth is compared absolutely.
RecoveryDecision decide_recovery(const Vec& xhat, const Vec& xstar,
                                 double epsilon);

// Default recovery thresholds: 1e-4 for L1/ATV, 1e-3 for the numerically
// harder conic ITV problems.
double default_recovery_epsilon(Prior p);

}  // namespace ctrecov
