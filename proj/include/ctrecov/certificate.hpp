#pragma once

#include <string>

#include "ctrecov/conic.hpp"
#include "ctrecov/grad.hpp"
#include "ctrecov/recon.hpp"

namespace ctrecov {

enum class Verdict { Unique, NotUnique, Indeterminate };

const char* verdict_name(Verdict v);

// Outcome of a solution-uniqueness test. For L1 and ATV the conditions are
// necessary and sufficient, so the verdict is Unique or NotUnique; the ITV
// conditions are sufficient only, so failure gives Indeterminate.
struct CertificateVerdict {
  Verdict verdict = Verdict::Indeterminate;
  double t_star = 0.0;      // optimal certificate bound; NaN if LP skipped
  bool rank_check = false;  // injectivity condition
  bool rank_ran = false;
  bool lp_ran = false;
  double epsilon = 1e-5;
  Vec w;  // dual certificate, stored when verdict == Unique
  Vec v;  // ATV: v over all rows; ITV: Y flattened (pair i at (i, i+r))
  SolveStatus solver_status = SolveStatus::Optimal;
  int lp_iterations = 0;
  double rank_seconds = 0.0;
  double lp_seconds = 0.0;
  std::string note;

  double wall_seconds() const { return rank_seconds + lp_seconds; }
};

struct CertOptions {
  double epsilon = 1e-5;      // strictness margin: Unique needs t* < 1 - eps
  double support_tol = 1e-9;  // support detection on exact generated images
  SolverOptions solver;
};

// L1 uniqueness: ker(A_I) = {0} and min ||A_{I^c}' w||_inf subject to
// A_I' w = sign(x*)_I attains t* < 1.
CertificateVerdict test_l1(const SparseMat& a, const Vec& xstar,
                           const CertOptions& opts = {});

// ATV uniqueness: ker(A) and ker(D^T restricted to inactive rows) intersect
// trivially, and the analysis LP attains t* < 1.
CertificateVerdict test_atv(const SparseMat& a, const AnisoGradOperator& op,
                            const Vec& xstar, const CertOptions& opts = {});

// ITV sufficient condition: the conic certificate program attains t* < 1 and
// A is injective on the subspace of images with inactive gradient groups.
CertificateVerdict test_itv(const SparseMat& a, const IsoGradOperator& op,
                            const Vec& xstar, const CertOptions& opts = {});

CertificateVerdict test_uniqueness(Prior prior, const SparseMat& a,
                                   const AnisoGradOperator& op,
                                   const Vec& xstar,
                                   const CertOptions& opts = {});

void write_verdict_json(const CertificateVerdict& verdict, Prior prior,
                        const std::string& path,
                        bool include_certificate = false);

}  // namespace ctrecov
