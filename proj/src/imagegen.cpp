#include "ctrecov/imagegen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ctrecov/rng.hpp"

namespace ctrecov {

const char* image_class_name(ImageClass c) {
  switch (c) {
    case ImageClass::Spikes: return "spikes";
    case ImageClass::SignedSpikes: return "signed-spikes";
    case ImageClass::TruncatedUniform: return "truncated-uniform";
    case ImageClass::AltprojAniso: return "altproj-aniso";
    case ImageClass::AltprojIso: return "altproj-iso";
    case ImageClass::AltprojNonneg: return "altproj-nonneg";
  }
  return "?";
}

ImageClass image_class_from_name(const std::string& name) {
  for (ImageClass c :
       {ImageClass::Spikes, ImageClass::SignedSpikes,
        ImageClass::TruncatedUniform, ImageClass::AltprojAniso,
        ImageClass::AltprojIso, ImageClass::AltprojNonneg}) {
    if (name == image_class_name(c)) return c;
  }
  throw InvalidArgument("unknown image class: " + name);
}

MaskedImage gen_spikes(const DiskMask& mask, long k, bool signed_values,
                       std::uint64_t seed) {
  if (k < 0 || k > mask.n)
    throw InvalidArgument("spike count k must be in [0, n]");
  SplitMix64 rng(seed);
  MaskedImage img;
  img.values = Vec::Zero(mask.n);
  img.n_side = mask.n_side;
  img.cls = signed_values ? ImageClass::SignedSpikes : ImageClass::Spikes;
  img.seed = seed;
  img.target_k = k;

  // partial Fisher-Yates for k distinct positions
  std::vector<int> pos(mask.n);
  std::iota(pos.begin(), pos.end(), 0);
  for (long i = 0; i < k; ++i) {
    const auto j = i + static_cast<long>(rng.next_below(mask.n - i));
    std::swap(pos[i], pos[j]);
    double v;
    do {
      v = signed_values ? 2.0 * rng.next_unit() - 1.0 : rng.next_unit();
    } while (v == 0.0);
    img.values(pos[i]) = v;
  }
  return img;
}

MaskedImage gen_truncated_uniform(const DiskMask& mask,
                                  const AnisoGradOperator& op, long k, int f,
                                  std::uint64_t seed) {
  if (f < 2) throw InvalidArgument("gray level count must be at least 2");
  if (k < 0) throw InvalidArgument("target k must be nonnegative");
  const double bc = static_cast<double>(op.interior_rows.size());
  const double bound = bc * (f - 1) / f;
  if (static_cast<double>(k) > bound) {
    std::ostringstream msg;
    msg << "target k = " << k << " exceeds |B^c|(F-1)/F = " << bound
        << " (|B^c| = " << op.interior_rows.size() << ", F = " << f << ")";
    throw InvalidArgument(msg.str());
  }
  const double omega =
      (1.0 - std::sqrt(1.0 - k * static_cast<double>(f) / (bc * (f - 1)))) / f;
  const double p_low = (f - 1) * omega;  // total mass of the narrow levels
  const double f_last = ((f - 1) * omega + 1.0) / 2.0;

  SplitMix64 rng(seed);
  MaskedImage img;
  img.values = Vec::Zero(mask.n);
  img.n_side = mask.n_side;
  img.cls = ImageClass::TruncatedUniform;
  img.seed = seed;
  img.target_k = k;
  for (int i = 0; i < mask.n; ++i) {
    const double u = rng.next_unit();
    if (u < p_low) {
      const auto level = static_cast<long>(u / omega);  // 0 .. f-2
      img.values(i) = (level + 0.5) * omega;
    } else {
      img.values(i) = f_last;
    }
  }
  return img;
}

namespace {

// keep the k largest magnitudes; on ties at the cut keep every entry of that
// magnitude, and if fewer than k entries are nonzero keep them all
void threshold_topk(Vec& v, long k) {
  const long n = v.size();
  if (k >= n) return;
  if (k == 0) {
    v.setZero();
    return;
  }
  std::vector<double> mags(n);
  for (long i = 0; i < n; ++i) mags[i] = std::abs(v(i));
  std::nth_element(mags.begin(), mags.begin() + (k - 1), mags.end(),
                   std::greater<double>());
  const double cut = mags[k - 1];
  if (cut == 0.0) return;  // fewer than k nonzeros: keep all of them
  for (long i = 0; i < n; ++i)
    if (std::abs(v(i)) < cut) v(i) = 0.0;
}

// groupwise variant on pair norms ||(v_i, v_{i+r})||
void threshold_topk_groups(Vec& v, long k, int r) {
  if (k >= r) return;
  if (k == 0) {
    v.setZero();
    return;
  }
  std::vector<double> mags(r);
  for (int i = 0; i < r; ++i) mags[i] = std::hypot(v(i), v(i + r));
  std::vector<double> sorted = mags;
  std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end(),
                   std::greater<double>());
  const double cut = sorted[k - 1];
  if (cut == 0.0) return;
  for (int i = 0; i < r; ++i) {
    if (mags[i] < cut) {
      v(i) = 0.0;
      v(i + r) = 0.0;
    }
  }
}

struct AltprojResult {
  Vec x;
  bool ok = false;
  double best_residual = 0.0;
};

AltprojResult altproj_once(const AnisoGradOperator& op, long k, bool grouped,
                           std::uint64_t seed, int max_iters,
                           double support_tol) {
  const int rows = op.rows();
  const int r = op.n();
  SplitMix64 rng(seed);
  Vec v(rows);
  for (int i = 0; i < rows; ++i) v(i) = rng.next_normal();

  AltprojResult res;
  res.best_residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iters; ++it) {
    Vec vr = range_project(op, v);
    Vec vt = vr;
    if (grouped)
      threshold_topk_groups(vt, k, r);
    else
      threshold_topk(vt, k);
    const double drift = (vt - vr).norm();
    res.best_residual = std::min(
        res.best_residual, vr.norm() > 0 ? drift / vr.norm() : drift);
    if (drift <= 1e-10 * vr.norm()) {
      Vec x = pinv_apply(op, vt);
      const double scale = x.cwiseAbs().maxCoeff();
      if (scale > 0.0) {
        x /= scale;
        vt /= scale;
      }
      const Vec z = op.diff_rows * x;
      // exact target sparsity and feasibility after the final projection
      long nnz = 0;
      double min_on = std::numeric_limits<double>::infinity();
      if (grouped) {
        for (int i = 0; i < r; ++i) {
          const double g = std::hypot(z(i), z(i + r));
          if (g > support_tol) {
            ++nnz;
            min_on = std::min(min_on, g);
          }
        }
      } else {
        for (int i = 0; i < rows; ++i) {
          if (std::abs(z(i)) > support_tol) {
            ++nnz;
            min_on = std::min(min_on, std::abs(z(i)));
          }
        }
      }
      const double vt_norm = vt.norm();
      const double feas =
          vt_norm > 0 ? (z - vt).norm() / vt_norm : (z - vt).norm();
      if (nnz == k && feas < 1e-8 && (k == 0 || min_on > 10 * support_tol)) {
        res.x = x;
        res.ok = true;
        return res;
      }
      // converged to a point violating the target; treat as failed attempt
      res.best_residual = std::min(res.best_residual, feas);
      return res;
    }
    v = vt;
  }
  return res;
}

MaskedImage gen_altproj_impl(const AnisoGradOperator& op, long k, bool grouped,
                             std::uint64_t seed, int max_iters,
                             int max_restarts, ImageClass cls) {
  const long domain = grouped ? op.n() : op.rows();
  if (k < 0 || k > domain)
    throw InvalidArgument("altproj target k out of range");
  constexpr double support_tol = 1e-9;
  double best = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < max_restarts; ++restart) {
    const AltprojResult res = altproj_once(
        op, k, grouped, derive_seed(seed, 0x616c7470, restart), max_iters,
        support_tol);
    best = std::min(best, res.best_residual);
    if (res.ok) {
      MaskedImage img;
      img.values = res.x;
      img.n_side = op.mask.n_side;
      img.cls = cls;
      img.seed = seed;
      img.target_k = k;
      return img;
    }
  }
  throw ConvergenceError(
      "alternating projection failed to reach target sparsity " +
          std::to_string(k) + " after " + std::to_string(max_restarts) +
          " restarts",
      best);
}

}  // namespace

MaskedImage gen_altproj(const AnisoGradOperator& op, long k,
                        std::uint64_t seed, int max_iters, int max_restarts) {
  return gen_altproj_impl(op, k, false, seed, max_iters, max_restarts,
                          ImageClass::AltprojAniso);
}

MaskedImage gen_altproj(const IsoGradOperator& op, long k, std::uint64_t seed,
                        int max_iters, int max_restarts) {
  return gen_altproj_impl(op.aniso, k, true, seed, max_iters, max_restarts,
                          ImageClass::AltprojIso);
}

MaskedImage to_nonneg(MaskedImage img) {
  const double lo = img.values.size() ? img.values.minCoeff() : 0.0;
  if (lo < 0.0) img.values.array() -= lo;
  if (img.cls == ImageClass::AltprojAniso) img.cls = ImageClass::AltprojNonneg;
  return img;
}

MaskedImage generate_image(const DiskMask& mask, const AnisoGradOperator& op,
                           const GeneratorConfig& cfg) {
  switch (cfg.cls) {
    case ImageClass::Spikes:
      return gen_spikes(mask, cfg.k, false, cfg.seed);
    case ImageClass::SignedSpikes:
      return gen_spikes(mask, cfg.k, true, cfg.seed);
    case ImageClass::TruncatedUniform:
      return gen_truncated_uniform(mask, op, cfg.k, cfg.gray_levels, cfg.seed);
    case ImageClass::AltprojAniso:
      return gen_altproj(op, cfg.k, cfg.seed, cfg.max_iters, cfg.max_restarts);
    case ImageClass::AltprojIso:
      return gen_altproj(IsoGradOperator{op}, cfg.k, cfg.seed, cfg.max_iters,
                         cfg.max_restarts);
    case ImageClass::AltprojNonneg:
      return to_nonneg(gen_altproj(op, cfg.k, cfg.seed, cfg.max_iters,
                                   cfg.max_restarts));
  }
  throw InvalidArgument("unknown image class");
}

void write_image_csv(const MaskedImage& img, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw InvalidArgument("cannot open for writing: " + path);
  std::fprintf(f, "n_side,class,k,seed\n");
  std::fprintf(f, "%d,%s,%ld,%llu\n", img.n_side, image_class_name(img.cls),
               img.target_k, static_cast<unsigned long long>(img.seed));
  for (long i = 0; i < img.values.size(); ++i)
    std::fprintf(f, "%.17g\n", img.values(i));
  std::fclose(f);
}

MaskedImage read_image_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open: " + path);
  std::string header, meta;
  if (!std::getline(in, header) || header != "n_side,class,k,seed")
    throw InvalidArgument("bad image CSV header in " + path);
  if (!std::getline(in, meta))
    throw InvalidArgument("missing image CSV metadata in " + path);
  MaskedImage img;
  {
    std::istringstream ss(meta);
    std::string ns, cls, k, seed;
    std::getline(ss, ns, ',');
    std::getline(ss, cls, ',');
    std::getline(ss, k, ',');
    std::getline(ss, seed, ',');
    img.n_side = std::stoi(ns);
    img.cls = image_class_from_name(cls);
    img.target_k = std::stol(k);
    img.seed = std::stoull(seed);
  }
  std::vector<double> vals;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    vals.push_back(std::stod(line));
  }
  img.values = Eigen::Map<Vec>(vals.data(), static_cast<long>(vals.size()));
  return img;
}

void write_image_pgm(const MaskedImage& img, const DiskMask& mask,
                     const std::string& path) {
  if (img.values.size() != mask.n)
    throw InvalidArgument("image and mask sizes disagree");
  double lo = 0.0, hi = 1.0;
  if (img.values.size()) {
    lo = std::min(0.0, img.values.minCoeff());
    hi = std::max(lo + 1e-30, static_cast<double>(img.values.maxCoeff()));
  }
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw InvalidArgument("cannot open for writing: " + path);
  std::fprintf(f, "P2\n%d %d\n255\n", mask.n_side, mask.n_side);
  for (int r = 0; r < mask.n_side; ++r) {
    for (int c = 0; c < mask.n_side; ++c) {
      int g = 0;
      const int j = mask.vec_index(r, c);
      if (j >= 0)
        g = static_cast<int>(
            std::lround(255.0 * (img.values(j) - lo) / (hi - lo)));
      std::fprintf(f, "%d%c", std::clamp(g, 0, 255),
                   c + 1 == mask.n_side ? '\n' : ' ');
    }
  }
  std::fclose(f);
}

}  // namespace ctrecov
