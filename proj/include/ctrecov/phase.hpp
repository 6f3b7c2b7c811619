#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ctrecov/certificate.hpp"
#include "ctrecov/imagegen.hpp"
#include "ctrecov/recon.hpp"

namespace ctrecov {

enum class RunMode { Reconstruction, Uniqueness, Both };

const char* run_mode_name(RunMode m);
RunMode run_mode_from_name(const std::string& name);

// Grid experiment over relative sparsity (kappa) and view counts, a fixed
// number of instances per kappa. Instances are generated once per
// (kappa, instance) from deterministic seeds and reused across all view
// counts.
struct ExperimentConfig {
  int n_side = 32;
  Prior prior = Prior::L1;
  ImageClass image_class = ImageClass::Spikes;
  std::vector<double> kappas;     // empty: defaults for the prior
  std::vector<int> view_counts;   // empty: 1..32
  int instances = 100;
  double recovery_epsilon = 0.0;  // 0: default for the prior
  double cert_epsilon = 1e-5;
  double support_tol = 1e-9;
  std::uint64_t master_seed = 1;
  RunMode mode = RunMode::Both;
  int workers = 1;
  int gray_levels = 40;
  int altproj_max_iters = 3000;
  int altproj_max_restarts = 10;
  std::string out_dir;  // empty: no checkpoints or result files
  SolverOptions solver;

  void fill_defaults();
  std::string config_hash() const;
  std::string to_json_string() const;
  static ExperimentConfig from_json_string(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
};

std::vector<double> default_kappas(Prior prior);
std::vector<int> default_view_counts();
long k_from_kappa(double kappa, int n);

struct InstanceOutcome {
  bool ran_recon = false;
  bool recovered = false;
  double rel_error = 0.0;
  double recon_seconds = 0.0;
  bool ran_cert = false;
  Verdict verdict = Verdict::Indeterminate;
  double t_star = 0.0;
  bool rank_check = false;
  double cert_seconds = 0.0;
  bool failed = false;
  std::string error;
};

struct CellResult {
  double kappa = 0.0;
  long k = 0;
  int n_v = 0;
  int instances = 0;
  int recon_successes = 0;
  int cert_uniques = 0;
  int failures = 0;
  std::vector<InstanceOutcome> outcomes;

  double fraction_recon() const {
    return instances ? static_cast<double>(recon_successes) / instances : 0.0;
  }
  double fraction_cert() const {
    return instances ? static_cast<double>(cert_uniques) / instances : 0.0;
  }
};

struct PhaseDiagram {
  ExperimentConfig config;
  int nv_suf = 0;
  std::vector<CellResult> cells;  // kappa-major, view_counts within

  const CellResult& cell(int kappa_idx, int view_idx) const {
    return cells[static_cast<std::size_t>(kappa_idx) *
                     config.view_counts.size() +
                 view_idx];
  }
  // per (kappa, instance): smallest tested view count from which the
  // instance stays recovered (or certified) through every larger tested
  // count; -1 when that never happens
  std::vector<std::vector<int>> minimal_sufficient_views(bool by_cert) const;
};

class PhaseRunner {
 public:
  explicit PhaseRunner(ExperimentConfig cfg);

  const ExperimentConfig& config() const { return cfg_; }
  int nv_suf();
  const SparseMat& matrix(int n_views);
  const MaskedImage& image(int kappa_idx, int instance);
  std::uint64_t instance_seed(int kappa_idx, int instance) const;

  InstanceOutcome run_instance(int kappa_idx, int instance, int n_views);
  CellResult run_cell(int kappa_idx, int n_views);
  PhaseDiagram run_diagram();

 private:
  ExperimentConfig cfg_;
  DiskMask mask_;
  AnisoGradOperator op_;
  IsoGradOperator iso_;
  int nv_suf_ = 0;
  std::map<int, SparseMat> matrices_;
  std::map<std::pair<int, int>, std::unique_ptr<MaskedImage>> images_;
  std::string cell_checkpoint_path(int kappa_idx, int n_views) const;
};

struct TransitionPoint {
  double kappa = 0.0;
  int instances = 0;
  bool defined = false;   // false when some instance never recovers in range
  double mean_mu = 0.0;
  double ci99_halfwidth = 0.0;
  double all_recovered_mu = 0.0;
};

struct TransitionCurve {
  std::vector<TransitionPoint> points;
  int nv_suf = 0;
  bool by_cert = false;
};

TransitionCurve transition_curve(const PhaseDiagram& diagram, bool by_cert);

struct BenchRow {
  double kappa = 0.0;
  int n_v = 0;
  int reps = 0;
  double recon_mean_s = 0.0, recon_std_s = 0.0;
  double cert_mean_s = 0.0, cert_std_s = 0.0;
  int rank_failures = 0;  // certificates decided by the rank check alone
};

// Mean and standard deviation of wall time per mode over `repetitions`
// fresh instances per (kappa, view-count) cell; single-threaded by design.
std::vector<BenchRow> bench_modes(const ExperimentConfig& cfg,
                                  int repetitions = 10);

void write_diagram_csv(const PhaseDiagram& diagram, const std::string& path);
void write_transition_csv(const TransitionCurve& curve,
                          const std::string& path);
void write_bench_csv(const ExperimentConfig& cfg,
                     const std::vector<BenchRow>& rows,
                     const std::string& path);
void write_run_metadata(const ExperimentConfig& cfg, int nv_suf,
                        const std::string& path);
void write_diagram_svg(const PhaseDiagram& diagram, bool by_cert,
                       const std::string& path);
void write_transition_svg(const std::vector<TransitionCurve>& curves,
                          const std::vector<std::string>& labels,
                          const std::string& path);

}  // namespace ctrecov
