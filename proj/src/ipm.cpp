#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ctrecov/conic.hpp"

// Homogeneous self-dual embedding of
//
//   min c'x  s.t.  A x = b,  G x + s = h,  s in K
//
// with variables (x, y, z, s, tau, kappa) and residual map
//
//   hx = A'y + G'z + c tau          -> 0
//   hy = A x - b tau                -> 0
//   hz = s + G x - h tau            -> 0
//   ht = kappa + c'x + b'y + h'z    -> 0
//   s o z = mu e,  tau kappa = mu   -> 0
//
// Search directions solve the symmetric quasi-definite system
//
//   [ 0   A'  G'  ] [dx]
//   [ A   0   0   ] [dy]  = rhs(dtau),
//   [ G   0  -W'W ] [dz]
//
// where W is the Nesterov-Todd scaling of (s, z); dtau follows from a scalar
// equation, and ds, dkappa from back-substitution. Predictor-corrector steps
// in the style of Mehrotra, residuals reduced by the centering factor.

namespace ctrecov {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ConeLayout {
  int n_orth = 0;
  std::vector<int> soc_dim;
  std::vector<int> soc_start;
  int total = 0;
  int degree = 0;  // orthant size + number of SOCs
};

ConeLayout make_layout(const ConicProgram& prog) {
  ConeLayout lay;
  lay.n_orth = prog.n_orthant();
  lay.soc_dim = prog.soc_dims();
  int off = lay.n_orth;
  for (int d : lay.soc_dim) {
    lay.soc_start.push_back(off);
    off += d;
  }
  lay.total = off;
  lay.degree = lay.n_orth + static_cast<int>(lay.soc_dim.size());
  return lay;
}

double soc_residue(const Eigen::Ref<const Vec>& u) {
  const double tail = u.tail(u.size() - 1).norm();
  return std::sqrt(std::max(0.0, (u(0) - tail) * (u(0) + tail)));
}

// identity element of the cone algebra
Vec cone_identity(const ConeLayout& lay) {
  Vec e = Vec::Zero(lay.total);
  e.head(lay.n_orth).setOnes();
  for (std::size_t i = 0; i < lay.soc_dim.size(); ++i)
    e(lay.soc_start[i]) = 1.0;
  return e;
}

// largest violation of strict cone membership (negative means interior)
double cone_violation(const Vec& u, const ConeLayout& lay) {
  double v = -kInf;
  for (int i = 0; i < lay.n_orth; ++i) v = std::max(v, -u(i));
  for (std::size_t i = 0; i < lay.soc_dim.size(); ++i) {
    const auto blk = u.segment(lay.soc_start[i], lay.soc_dim[i]);
    v = std::max(v, blk.tail(blk.size() - 1).norm() - blk(0));
  }
  return v;
}

Vec jordan_prod(const Vec& u, const Vec& v, const ConeLayout& lay) {
  Vec out(lay.total);
  out.head(lay.n_orth) =
      u.head(lay.n_orth).cwiseProduct(v.head(lay.n_orth));
  for (std::size_t i = 0; i < lay.soc_dim.size(); ++i) {
    const int st = lay.soc_start[i];
    const int d = lay.soc_dim[i];
    const auto ub = u.segment(st, d);
    const auto vb = v.segment(st, d);
    out(st) = ub.dot(vb);
    out.segment(st + 1, d - 1) =
        ub(0) * vb.tail(d - 1) + vb(0) * ub.tail(d - 1);
  }
  return out;
}

// solve lambda o u = d
Vec jordan_div(const Vec& lambda, const Vec& d, const ConeLayout& lay) {
  Vec out(lay.total);
  out.head(lay.n_orth) =
      d.head(lay.n_orth).cwiseQuotient(lambda.head(lay.n_orth));
  for (std::size_t i = 0; i < lay.soc_dim.size(); ++i) {
    const int st = lay.soc_start[i];
    const int dim = lay.soc_dim[i];
    const auto lb = lambda.segment(st, dim);
    const auto db = d.segment(st, dim);
    const double det = (lb(0) - lb.tail(dim - 1).norm()) *
                       (lb(0) + lb.tail(dim - 1).norm());
    const double u0 = (lb(0) * db(0) - lb.tail(dim - 1).dot(db.tail(dim - 1))) / det;
    out(st) = u0;
    out.segment(st + 1, dim - 1) =
        (db.tail(dim - 1) - u0 * lb.tail(dim - 1)) / lb(0);
  }
  return out;
}

// largest step with u + alpha du staying in the cone
double max_step(const Vec& u, const Vec& du, const ConeLayout& lay) {
  double alpha = kInf;
  for (int i = 0; i < lay.n_orth; ++i)
    if (du(i) < 0) alpha = std::min(alpha, -u(i) / du(i));
  for (std::size_t i = 0; i < lay.soc_dim.size(); ++i) {
    const int st = lay.soc_start[i];
    const int d = lay.soc_dim[i];
    const auto ub = u.segment(st, d);
    const auto db = du.segment(st, d);
    const double a = (db(0) - db.tail(d - 1).norm()) *
                     (db(0) + db.tail(d - 1).norm());
    const double b = 2.0 * (ub(0) * db(0) - ub.tail(d - 1).dot(db.tail(d - 1)));
    const double c = (ub(0) - ub.tail(d - 1).norm()) *
                     (ub(0) + ub.tail(d - 1).norm());
    double root = kInf;
    if (std::abs(a) < 1e-300) {
      if (b < 0) root = -c / b;
    } else {
      const double disc = b * b - 4.0 * a * c;
      if (disc >= 0) {
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
        for (double r : {q / a, (q != 0.0 ? c / q : kInf)})
          if (r > 0 && r < root) root = r;
        if (a < 0 && root == kInf) root = std::max(q / a, c / q);
      }
    }
    if (root < alpha) alpha = root;
  }
  return alpha;
}

// Nesterov-Todd scaling: symmetric W with lambda = W z = W^{-1} s
struct Scaling {
  Vec w_orth;      // sqrt(s_i / z_i)
  std::vector<Mat> soc_w;
  std::vector<Mat> soc_winv;
  std::vector<Mat> soc_w2;
  std::vector<Mat> soc_w2inv;
  Vec lambda;
  const ConeLayout* lay = nullptr;

  Vec apply(const Vec& u) const {  // W u
    Vec out(lay->total);
    out.head(lay->n_orth) =
        w_orth.cwiseProduct(u.head(lay->n_orth));
    for (std::size_t i = 0; i < lay->soc_dim.size(); ++i)
      out.segment(lay->soc_start[i], lay->soc_dim[i]) =
          soc_w[i] * u.segment(lay->soc_start[i], lay->soc_dim[i]);
    return out;
  }
  Vec apply_inv(const Vec& u) const {  // W^{-1} u
    Vec out(lay->total);
    out.head(lay->n_orth) =
        u.head(lay->n_orth).cwiseQuotient(w_orth);
    for (std::size_t i = 0; i < lay->soc_dim.size(); ++i)
      out.segment(lay->soc_start[i], lay->soc_dim[i]) =
          soc_winv[i] * u.segment(lay->soc_start[i], lay->soc_dim[i]);
    return out;
  }
  Vec apply_sq(const Vec& u) const {  // W^2 u
    Vec out(lay->total);
    out.head(lay->n_orth) =
        w_orth.cwiseAbs2().cwiseProduct(u.head(lay->n_orth));
    for (std::size_t i = 0; i < lay->soc_dim.size(); ++i)
      out.segment(lay->soc_start[i], lay->soc_dim[i]) =
          soc_w2[i] * u.segment(lay->soc_start[i], lay->soc_dim[i]);
    return out;
  }
  Vec apply_sq_inv(const Vec& u) const {  // W^{-2} u
    Vec out(lay->total);
    out.head(lay->n_orth) =
        u.head(lay->n_orth).cwiseQuotient(w_orth.cwiseAbs2());
    for (std::size_t i = 0; i < lay->soc_dim.size(); ++i)
      out.segment(lay->soc_start[i], lay->soc_dim[i]) =
          soc_w2inv[i] * u.segment(lay->soc_start[i], lay->soc_dim[i]);
    return out;
  }
};

Scaling compute_scaling(const Vec& s, const Vec& z, const ConeLayout& lay) {
  Scaling w;
  w.lay = &lay;
  w.w_orth = (s.head(lay.n_orth).cwiseQuotient(z.head(lay.n_orth)))
                 .cwiseSqrt();
  w.lambda.resize(lay.total);
  w.lambda.head(lay.n_orth) =
      (s.head(lay.n_orth).cwiseProduct(z.head(lay.n_orth))).cwiseSqrt();
  for (std::size_t i = 0; i < lay.soc_dim.size(); ++i) {
    const int st = lay.soc_start[i];
    const int d = lay.soc_dim[i];
    const Vec sb = s.segment(st, d) / soc_residue(s.segment(st, d));
    const Vec zb = z.segment(st, d) / soc_residue(z.segment(st, d));
    const double gamma = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
    // NT scaling point (Jordan-unit), its Jordan square root v, and
    // W = eta * (2 v v' - J) so that W^2 = eta^2 * (2 wb wb' - J)
    Vec wb(d);
    wb(0) = (sb(0) + zb(0)) / (2.0 * gamma);
    wb.tail(d - 1) = (sb.tail(d - 1) - zb.tail(d - 1)) / (2.0 * gamma);
    Vec v(d);
    v(0) = std::sqrt(0.5 * (wb(0) + 1.0));
    v.tail(d - 1) = wb.tail(d - 1) / (2.0 * v(0));
    const double eta = std::sqrt(soc_residue(s.segment(st, d)) /
                                 soc_residue(z.segment(st, d)));
    Mat j = -Mat::Identity(d, d);
    j(0, 0) = 1.0;
    Mat wmat = eta * (2.0 * v * v.transpose() - j);
    Vec jv = v;
    jv.tail(d - 1) = -v.tail(d - 1);
    Mat winv = (1.0 / eta) * (2.0 * jv * jv.transpose() - j);
    Vec jwb = wb;
    jwb.tail(d - 1) = -wb.tail(d - 1);
    w.soc_w.push_back(wmat);
    w.soc_winv.push_back(winv);
    w.soc_w2.push_back(eta * eta * (2.0 * wb * wb.transpose() - j));
    w.soc_w2inv.push_back((2.0 * jwb * jwb.transpose() - j) / (eta * eta));
    w.lambda.segment(st, d) = wmat * z.segment(st, d);
  }
  return w;
}

// Solver for the quasi-definite system
//
//   [ 0   A'  G'  ] [x]   [rx]
//   [ A   0   0   ] [y] = [ry]
//   [ G   0  -W'W ] [z]   [rz]
//
// Default path: normal equations through the cone-block Schur reduction,
//   H x + A' y = rx + G' W^{-2} rz,      H = G' W^{-2} G,
//   (A H^{-1} A') y = A H^{-1} rtx - ry,
// with a Cholesky factor of H (sparse or dense, chosen by fill) and a dense
// Cholesky of the equality Schur complement. Static regularization on both
// diagonals; iterative refinement against the unregularized system. When a
// variable appears in no cone row H is structurally singular and the solver
// falls back to a factorization of the full augmented matrix (dense LU for
// small systems, sparse LDLT otherwise).
class KktSolver {
 public:
  KktSolver(const SparseMat& a, const SparseMat& g, const ConeLayout& lay,
            const SolverOptions& opts)
      : a_(a), g_(g), at_(a.transpose()), gt_(g.transpose()), lay_(lay),
        opts_(opts), n_(static_cast<int>(a.cols())),
        p_(static_cast<int>(a.rows())), m_(static_cast<int>(g.rows())) {
    dim_ = n_ + p_ + m_;
    std::vector<bool> covered(n_, false);
    for (int k = 0; k < g_.outerSize(); ++k)
      for (SparseMat::InnerIterator it(g_, k); it; ++it)
        covered[it.col()] = true;
    bool all_covered = true;
    for (bool c : covered) all_covered = all_covered && c;
    if (dim_ <= opts.dense_kkt_dim || !all_covered)
      mode_ = Mode::Augmented;
    else
      mode_ = Mode::Reduced;
    if (mode_ == Mode::Reduced && p_ > 0) at_dense_ = Mat(at_);
  }

  void factor(const Scaling& w) {
    scaling_ = &w;
    ok_ = true;
    if (mode_ == Mode::Reduced)
      factor_reduced(w);
    else
      factor_augmented(w);
  }

  bool ok() const { return ok_; }

  // unregularized KKT matvec
  Vec apply(const Vec& u) const {
    Vec out(dim_);
    const auto ux = u.head(n_);
    const auto uy = u.segment(n_, p_);
    const auto uz = u.tail(m_);
    out.head(n_) = at_ * uy + gt_ * uz;
    out.segment(n_, p_) = a_ * ux;
    out.tail(m_) = g_ * ux - scaling_->apply_sq(uz);
    return out;
  }

  Vec solve(const Vec& rhs) const {
    Vec sol = factored_solve(rhs);
    for (int round = 0; round < 3; ++round) {
      Vec resid = rhs - apply(sol);
      const double rn = resid.norm();
      if (!(rn > 1e-11 * (1.0 + rhs.norm()))) break;
      sol += factored_solve(resid);
    }
    return sol;
  }

 private:
  enum class Mode { Reduced, Augmented };

  // Cholesky with escalating diagonal shifts; late-stage scaling matrices
  // are extreme enough that a fixed tiny shift can hit roundoff-negative
  // pivots, and iterative refinement absorbs the added regularization.
  bool dense_chol(Eigen::LLT<Mat>& llt, const Mat& m) const {
    const double scale = m.diagonal().cwiseAbs().maxCoeff() + 1.0;
    double shift = opts_.static_reg;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Mat t = m;
      t.diagonal().array() += shift;
      llt.compute(t);
      if (llt.info() == Eigen::Success) return true;
      shift = std::max(shift * 100.0, 1e-14 * scale);
    }
    return false;
  }
  bool sparse_chol(Eigen::SimplicialLLT<SparseMat, Eigen::Lower>& llt,
                   const SparseMat& m) const {
    double scale = 1.0;
    for (int i = 0; i < m.rows(); ++i) scale = std::max(scale, m.coeff(i, i));
    double shift = opts_.static_reg;
    for (int attempt = 0; attempt < 8; ++attempt) {
      llt.setShift(shift);
      llt.factorize(m);
      if (llt.info() == Eigen::Success) return true;
      shift = std::max(shift * 100.0, 1e-14 * scale);
    }
    return false;
  }

  void factor_reduced(const Scaling& w) {
    // block-diagonal W^{-2} as a sparse matrix
    std::vector<Triplet> trip;
    trip.reserve(lay_.n_orth + 9 * lay_.soc_dim.size());
    for (int i = 0; i < lay_.n_orth; ++i)
      trip.emplace_back(i, i, 1.0 / (w.w_orth(i) * w.w_orth(i)));
    for (std::size_t b = 0; b < lay_.soc_dim.size(); ++b) {
      const int st = lay_.soc_start[b];
      const int d = lay_.soc_dim[b];
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          trip.emplace_back(st + i, st + j, w.soc_w2inv[b](i, j));
    }
    SparseMat w2inv(m_, m_);
    w2inv.setFromTriplets(trip.begin(), trip.end());
    SparseMat h = gt_ * SparseMat(w2inv * g_);
    h.makeCompressed();

    if (!h_mode_decided_) {
      const double density =
          static_cast<double>(h.nonZeros()) / (double(n_) * n_);
      h_dense_ = n_ <= 500 || density > 0.12;
      h_mode_decided_ = true;
    }
    if (h_dense_) {
      if (!dense_chol(h_llt_dense_, Mat(h))) {
        ok_ = false;
        fail_part_ = "H (dense)";
        return;
      }
    } else {
      if (!h_analyzed_) {
        h_llt_sparse_.analyzePattern(h);
        h_analyzed_ = true;
      }
      if (!sparse_chol(h_llt_sparse_, h)) {
        ok_ = false;
        fail_part_ = "H (sparse)";
        return;
      }
    }
    if (p_ > 0) {
      const Mat hinv_at = h_solve_mat(at_dense_);
      if (!dense_chol(s_llt_, Mat(a_ * hinv_at))) {
        ok_ = false;
        fail_part_ = "S";
      }
    }
  }

  void factor_augmented(const Scaling& w) {
    std::vector<Triplet> trip;
    trip.reserve(2 * (a_.nonZeros() + g_.nonZeros()) + dim_ +
                 9 * lay_.soc_dim.size());
    const double reg = opts_.static_reg;
    for (int i = 0; i < n_; ++i) trip.emplace_back(i, i, reg);
    for (int k = 0; k < a_.outerSize(); ++k)
      for (SparseMat::InnerIterator it(a_, k); it; ++it) {
        trip.emplace_back(n_ + static_cast<int>(it.row()),
                          static_cast<int>(it.col()), it.value());
        trip.emplace_back(static_cast<int>(it.col()),
                          n_ + static_cast<int>(it.row()), it.value());
      }
    for (int i = 0; i < p_; ++i) trip.emplace_back(n_ + i, n_ + i, -reg);
    for (int k = 0; k < g_.outerSize(); ++k)
      for (SparseMat::InnerIterator it(g_, k); it; ++it) {
        trip.emplace_back(n_ + p_ + static_cast<int>(it.row()),
                          static_cast<int>(it.col()), it.value());
        trip.emplace_back(static_cast<int>(it.col()),
                          n_ + p_ + static_cast<int>(it.row()), it.value());
      }
    for (int i = 0; i < lay_.n_orth; ++i) {
      const double wi = w.w_orth(i);
      trip.emplace_back(n_ + p_ + i, n_ + p_ + i, -(wi * wi + reg));
    }
    for (std::size_t b = 0; b < lay_.soc_dim.size(); ++b) {
      const int st = n_ + p_ + lay_.soc_start[b];
      const int d = lay_.soc_dim[b];
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          trip.emplace_back(st + i, st + j,
                            -w.soc_w2[b](i, j) - (i == j ? reg : 0.0));
    }
    SparseMat k(dim_, dim_);
    k.setFromTriplets(trip.begin(), trip.end());
    k.makeCompressed();
    if (dim_ <= opts_.dense_kkt_dim) {
      dense_lu_.compute(Mat(k));
      return;
    }
    if (!analyzed_) {
      ldlt_.analyzePattern(k);
      analyzed_ = true;
    }
    ldlt_.factorize(k);
    if (ldlt_.info() != Eigen::Success) {
      if (dim_ <= 6000) {
        dense_lu_.compute(Mat(k));
        use_dense_fallback_ = true;
      } else {
        ok_ = false;
      }
    }
  }

  Mat h_solve_mat(const Mat& rhs) const {
    return h_dense_ ? Mat(h_llt_dense_.solve(rhs))
                    : Mat(h_llt_sparse_.solve(rhs));
  }
  Vec h_solve(const Vec& rhs) const {
    return h_dense_ ? Vec(h_llt_dense_.solve(rhs))
                    : Vec(h_llt_sparse_.solve(rhs));
  }

  Vec factored_solve(const Vec& rhs) const {
    if (mode_ == Mode::Augmented) {
      if (dim_ <= opts_.dense_kkt_dim || use_dense_fallback_)
        return dense_lu_.solve(rhs);
      return ldlt_.solve(rhs);
    }
    const auto rx = rhs.head(n_);
    const auto ry = rhs.segment(n_, p_);
    const auto rz = rhs.tail(m_);
    const Vec rtx = rx + gt_ * scaling_->apply_sq_inv(rz);
    Vec sol(dim_);
    if (p_ > 0) {
      const Vec y = s_llt_.solve(a_ * h_solve(rtx) - ry);
      sol.segment(n_, p_) = y;
      sol.head(n_) = h_solve(rtx - at_ * y);
    } else {
      sol.head(n_) = h_solve(rtx);
    }
    sol.tail(m_) =
        scaling_->apply_sq_inv(g_ * sol.head(n_) - rz);
    return sol;
  }

  const SparseMat& a_;
  const SparseMat& g_;
  SparseMat at_, gt_;
  Mat at_dense_;
 public:
  std::string fail_part_;
 private:
  const ConeLayout& lay_;
  const SolverOptions& opts_;
  int n_, p_, m_, dim_ = 0;
  Mode mode_ = Mode::Augmented;
  bool analyzed_ = false;
  bool h_analyzed_ = false;
  bool h_mode_decided_ = false;
  bool h_dense_ = false;
  bool use_dense_fallback_ = false;
  bool ok_ = false;
  const Scaling* scaling_ = nullptr;
  Eigen::SimplicialLDLT<SparseMat, Eigen::Lower> ldlt_;
  Eigen::SimplicialLLT<SparseMat, Eigen::Lower> h_llt_sparse_;
  Eigen::LLT<Mat> h_llt_dense_;
  Eigen::LLT<Mat> s_llt_;
  Eigen::PartialPivLU<Mat> dense_lu_;
};

struct Iterate {
  Vec x, y, z, s;
  double tau = 1.0, kappa = 1.0;
};

}  // namespace

SolverResult solve(const ConicProgram& prog, const SolverOptions& opts) {
  const Vec& c = prog.c();
  const SparseMat& a = prog.eq_matrix();
  const Vec& b = prog.eq_rhs();
  const SparseMat& g = prog.cone_matrix();
  const Vec& h = prog.cone_rhs();
  const ConeLayout lay = make_layout(prog);
  const int n = prog.num_vars();
  const int p = prog.num_eq();
  const int m = lay.total;
  if (m == 0)
    throw InvalidArgument("program has no cone constraints");

  const SparseMat at = a.transpose();
  const SparseMat gt = g.transpose();
  const Vec e = cone_identity(lay);
  const double nu = lay.degree;

  SolverResult res;
  res.message = "max iterations reached";

  KktSolver kkt(a, g, lay, opts);
  Iterate it;
  it.x = Vec::Zero(n);
  it.y = Vec::Zero(p);

  {  // scaled starting point from two least-squares-type solves
    Scaling unit;
    ConeLayout* laymut = const_cast<ConeLayout*>(&lay);
    unit.lay = laymut;
    unit.w_orth = Vec::Ones(lay.n_orth);
    for (int d : lay.soc_dim) {
      unit.soc_w.push_back(Mat::Identity(d, d));
      unit.soc_winv.push_back(Mat::Identity(d, d));
      unit.soc_w2.push_back(Mat::Identity(d, d));
    }
    unit.lambda = e;
    kkt.factor(unit);
    if (!kkt.ok()) {
      res.message = "initial KKT factorization failed";
      return res;
    }
    Vec rhs1(n + p + m);
    rhs1 << Vec::Zero(n), b, h;
    const Vec sol1 = kkt.solve(rhs1);
    it.x = sol1.head(n);
    Vec s0 = -sol1.tail(m);
    const double vp = cone_violation(s0, lay);
    it.s = vp < 0 ? s0 : s0 + (1.0 + vp) * e;

    Vec rhs2(n + p + m);
    rhs2 << -c, Vec::Zero(p), Vec::Zero(m);
    const Vec sol2 = kkt.solve(rhs2);
    it.y = sol2.segment(n, p);
    Vec z0 = sol2.tail(m);
    const double vd = cone_violation(z0, lay);
    it.z = vd < 0 ? z0 : z0 + (1.0 + vd) * e;
  }

  double best_score = kInf;
  const auto record = [&](SolveStatus status, const std::string& msg,
                          int iters) {
    res.status = status;
    res.message = msg;
    res.iterations = iters;
  };

  for (int iter = 0; iter <= opts.max_iters; ++iter) {
    // residuals of the embedding
    const Vec hx = at * it.y + gt * it.z + c * it.tau;
    const Vec hy = a * it.x - b * it.tau;
    const Vec hz = it.s + g * it.x - h * it.tau;
    const double ht =
        it.kappa + c.dot(it.x) + b.dot(it.y) + h.dot(it.z);
    const double mu = (it.s.dot(it.z) + it.tau * it.kappa) / (nu + 1.0);

    // convergence on the de-homogenized point
    const Vec xs = it.x / it.tau;
    const Vec ys = it.y / it.tau;
    const Vec zs = it.z / it.tau;
    const Vec ss = it.s / it.tau;
    const double pobj = c.dot(xs);
    const double dobj = -b.dot(ys) - h.dot(zs);
    const double gap_abs = ss.dot(zs);
    const double pres =
        std::max((a * xs - b).norm() / (1.0 + b.norm()),
                 (g * xs + ss - h).norm() / (1.0 + h.norm()));
    const double dres = (at * ys + gt * zs + c).norm() / (1.0 + c.norm());
    const double relgap = gap_abs / std::max(1.0, std::abs(pobj));

    const double score = std::max({pres, dres, relgap});
    if (score < best_score) {
      best_score = score;
      res.x = xs;
      res.y = ys;
      res.z = zs;
      res.s = ss;
      res.primal_obj = pobj;
      res.dual_obj = dobj;
      res.gap = gap_abs;
      res.rel_gap = relgap;
      res.primal_res = pres;
      res.dual_res = dres;
    }
    if (opts.verbose)
      std::printf("it %3d  pres %.2e dres %.2e gap %.2e mu %.2e tau %.2e kappa %.2e\n",
                  iter, pres, dres, relgap, mu, it.tau, it.kappa);

    if (pres <= opts.feas_tol && dres <= opts.feas_tol &&
        (relgap <= opts.gap_tol ||
         std::abs(pobj - dobj) <= opts.gap_tol * std::max(1.0, std::abs(pobj)))) {
      record(SolveStatus::Optimal, "optimal", iter);
      return res;
    }

    // Farkas certificates
    const double beta_p = -(b.dot(it.y) + h.dot(it.z));
    if (beta_p > 0) {
      const double rp = (at * it.y + gt * it.z).norm() / beta_p;
      if (rp <= opts.feas_tol) {
        record(SolveStatus::PrimalInfeasible,
               "primal infeasible (Farkas certificate in y, z)", iter);
        res.y = it.y / beta_p;
        res.z = it.z / beta_p;
        res.x.setConstant(n, std::nan(""));
        res.s.setConstant(m, std::nan(""));
        return res;
      }
    }
    const double beta_d = -c.dot(it.x);
    if (beta_d > 0) {
      const double rd = std::max((a * it.x).norm(),
                                 (g * it.x + it.s).norm()) /
                        beta_d;
      if (rd <= opts.feas_tol) {
        record(SolveStatus::DualInfeasible,
               "dual infeasible (unbounded ray in x)", iter);
        res.x = it.x / beta_d;
        res.s = it.s / beta_d;
        res.y.setConstant(p, std::nan(""));
        res.z.setConstant(m, std::nan(""));
        return res;
      }
    }
    if (iter == opts.max_iters) break;

    const Scaling w = compute_scaling(it.s, it.z, lay);
    kkt.factor(w);
    if (!kkt.ok()) {
      record(SolveStatus::NumericalFailure,
             "KKT factorization failed: " + kkt.fail_part_, iter);
      return res;
    }

    Vec rhs_static(n + p + m);
    rhs_static << -c, b, h;
    const Vec v1 = kkt.solve(rhs_static);
    const double cv = c.dot(v1.head(n)) + b.dot(v1.segment(n, p)) +
                      h.dot(v1.tail(m));

    const Vec lam_sq = jordan_prod(w.lambda, w.lambda, lay);

    struct Direction {
      Vec dx, dy, dz, ds;
      double dtau, dkappa;
    };
    const auto newton = [&](double sigma, const Vec& ds_target,
                            double dkappa_target) {
      const double rscale = 1.0 - sigma;
      const Vec dsl = jordan_div(w.lambda, ds_target, lay);
      Vec rhs(n + p + m);
      rhs << -rscale * hx, -rscale * hy, -rscale * hz - w.apply(dsl);
      const Vec u = kkt.solve(rhs);
      const double cu = c.dot(u.head(n)) + b.dot(u.segment(n, p)) +
                        h.dot(u.tail(m));
      const double dtau =
          (-rscale * ht - dkappa_target / it.tau - cu) /
          (cv - it.kappa / it.tau);
      Direction d;
      d.dx = u.head(n) + dtau * v1.head(n);
      d.dy = u.segment(n, p) + dtau * v1.segment(n, p);
      d.dz = u.tail(m) + dtau * v1.tail(m);
      d.ds = w.apply(dsl - w.apply(d.dz));
      d.dtau = dtau;
      d.dkappa = (dkappa_target - it.kappa * dtau) / it.tau;
      return d;
    };

    const auto step_bound = [&](const Direction& d) {
      double alpha = std::min(max_step(it.s, d.ds, lay),
                              max_step(it.z, d.dz, lay));
      if (d.dtau < 0) alpha = std::min(alpha, -it.tau / d.dtau);
      if (d.dkappa < 0) alpha = std::min(alpha, -it.kappa / d.dkappa);
      return alpha;
    };

    // predictor
    const Direction aff = newton(0.0, -lam_sq, -it.tau * it.kappa);
    const double alpha_aff = std::min(1.0, step_bound(aff));
    const double mu_aff =
        ((it.s + alpha_aff * aff.ds).dot(it.z + alpha_aff * aff.dz) +
         (it.tau + alpha_aff * aff.dtau) *
             (it.kappa + alpha_aff * aff.dkappa)) /
        (nu + 1.0);
    double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

    // corrector
    const Vec corr = jordan_prod(w.apply_inv(aff.ds), w.apply(aff.dz), lay);
    const Vec ds_target = -lam_sq - corr + sigma * mu * e;
    const double dkappa_target =
        -it.tau * it.kappa - aff.dtau * aff.dkappa + sigma * mu;
    const Direction dir = newton(sigma, ds_target, dkappa_target);

    const double alpha = std::min(1.0, 0.99 * step_bound(dir));
    if (!(alpha > 1e-10) || !std::isfinite(alpha)) {
      record(SolveStatus::NumericalFailure,
             "step length collapsed (best iterate attached)", iter);
      return res;
    }
    it.x += alpha * dir.dx;
    it.y += alpha * dir.dy;
    it.z += alpha * dir.dz;
    it.s += alpha * dir.ds;
    it.tau += alpha * dir.dtau;
    it.kappa += alpha * dir.dkappa;
    if (!(it.tau > 0) || !std::isfinite(it.tau)) {
      record(SolveStatus::NumericalFailure, "tau collapsed", iter);
      return res;
    }
  }

  record(SolveStatus::NumericalFailure,
         "iteration limit reached (best iterate attached)", opts.max_iters);
  return res;
}

}  // namespace ctrecov
