#include "ctrecov/phase.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "ctrecov/rng.hpp"
#include "ctrecov/stats.hpp"
#include "ctrecov/svg.hpp"

namespace ctrecov {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void parallel_for(int workers, int n, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  for (auto& t : pool) t.join();
}

// seed stream id; the nonnegative variant shares the base class stream so
// shifted pairs are generated from identical draws
std::uint64_t class_seed_id(ImageClass c) {
  switch (c) {
    case ImageClass::Spikes: return 1;
    case ImageClass::SignedSpikes: return 2;
    case ImageClass::TruncatedUniform: return 3;
    case ImageClass::AltprojAniso: return 4;
    case ImageClass::AltprojIso: return 5;
    case ImageClass::AltprojNonneg: return 4;
  }
  return 0;
}

json outcome_to_json(const InstanceOutcome& o) {
  json j;
  j["ran_recon"] = o.ran_recon;
  j["recovered"] = o.recovered;
  j["rel_error"] = o.rel_error;
  j["recon_seconds"] = o.recon_seconds;
  j["ran_cert"] = o.ran_cert;
  j["verdict"] = verdict_name(o.verdict);
  j["t_star"] = std::isnan(o.t_star) ? json(nullptr) : json(o.t_star);
  j["rank_check"] = o.rank_check;
  j["cert_seconds"] = o.cert_seconds;
  j["failed"] = o.failed;
  if (!o.error.empty()) j["error"] = o.error;
  return j;
}

InstanceOutcome outcome_from_json(const json& j) {
  InstanceOutcome o;
  o.ran_recon = j.at("ran_recon").get<bool>();
  o.recovered = j.at("recovered").get<bool>();
  o.rel_error = j.at("rel_error").get<double>();
  o.recon_seconds = j.at("recon_seconds").get<double>();
  o.ran_cert = j.at("ran_cert").get<bool>();
  const std::string v = j.at("verdict").get<std::string>();
  o.verdict = v == "unique" ? Verdict::Unique
              : v == "not-unique" ? Verdict::NotUnique
                                  : Verdict::Indeterminate;
  o.t_star = j.at("t_star").is_null()
                 ? std::numeric_limits<double>::quiet_NaN()
                 : j.at("t_star").get<double>();
  o.rank_check = j.at("rank_check").get<bool>();
  o.cert_seconds = j.at("cert_seconds").get<double>();
  o.failed = j.at("failed").get<bool>();
  if (j.contains("error")) o.error = j.at("error").get<std::string>();
  return o;
}

}  // namespace

const char* run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::Reconstruction: return "reconstruction";
    case RunMode::Uniqueness: return "uniqueness";
    case RunMode::Both: return "both";
  }
  return "?";
}

RunMode run_mode_from_name(const std::string& name) {
  if (name == "reconstruction") return RunMode::Reconstruction;
  if (name == "uniqueness") return RunMode::Uniqueness;
  if (name == "both") return RunMode::Both;
  throw InvalidArgument("unknown run mode: " + name);
}

std::vector<double> default_kappas(Prior prior) {
  std::vector<double> ks = {0.025, 0.05};
  for (double k = 0.1; k < 0.95; k += 0.1) ks.push_back(k);
  if (prior == Prior::ATV)
    for (double k = 1.0; k < 1.95; k += 0.1) ks.push_back(k);
  for (double& k : ks) k = std::round(k * 1000) / 1000;
  return ks;
}

std::vector<int> default_view_counts() {
  std::vector<int> vs(32);
  for (int i = 0; i < 32; ++i) vs[i] = i + 1;
  return vs;
}

long k_from_kappa(double kappa, int n) {
  return std::lround(kappa * n);
}

void ExperimentConfig::fill_defaults() {
  if (n_side < 2) throw InvalidArgument("n_side must be at least 2");
  if (instances < 1) throw InvalidArgument("instances must be at least 1");
  if (kappas.empty()) kappas = default_kappas(prior);
  if (view_counts.empty()) view_counts = default_view_counts();
  if (recovery_epsilon <= 0.0)
    recovery_epsilon = default_recovery_epsilon(prior);
  const double kmax = prior == Prior::ATV ? 2.0 : 1.0;
  for (double k : kappas)
    if (k < 0.0 || k > kmax)
      throw InvalidArgument("relative sparsity out of range for prior");
  for (int v : view_counts)
    if (v < 1) throw InvalidArgument("view counts must be positive");
}

std::string ExperimentConfig::to_json_string() const {
  json j;
  j["n_side"] = n_side;
  j["prior"] = prior_name(prior);
  j["image_class"] = image_class_name(image_class);
  j["kappas"] = kappas;
  j["view_counts"] = view_counts;
  j["instances"] = instances;
  j["recovery_epsilon"] = recovery_epsilon;
  j["cert_epsilon"] = cert_epsilon;
  j["support_tol"] = support_tol;
  j["master_seed"] = std::to_string(master_seed);
  j["mode"] = run_mode_name(mode);
  j["workers"] = workers;
  j["gray_levels"] = gray_levels;
  j["altproj_max_iters"] = altproj_max_iters;
  j["altproj_max_restarts"] = altproj_max_restarts;
  j["out_dir"] = out_dir;
  j["solver"] = {{"feas_tol", solver.feas_tol},
                 {"gap_tol", solver.gap_tol},
                 {"max_iters", solver.max_iters}};
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json_string(const std::string& text) {
  const json j = json::parse(text);
  ExperimentConfig c;
  if (j.contains("n_side")) c.n_side = j["n_side"].get<int>();
  if (j.contains("prior")) c.prior = prior_from_name(j["prior"]);
  if (j.contains("image_class"))
    c.image_class = image_class_from_name(j["image_class"]);
  if (j.contains("kappas")) c.kappas = j["kappas"].get<std::vector<double>>();
  if (j.contains("view_counts"))
    c.view_counts = j["view_counts"].get<std::vector<int>>();
  if (j.contains("instances")) c.instances = j["instances"].get<int>();
  if (j.contains("recovery_epsilon"))
    c.recovery_epsilon = j["recovery_epsilon"].get<double>();
  if (j.contains("cert_epsilon"))
    c.cert_epsilon = j["cert_epsilon"].get<double>();
  if (j.contains("support_tol"))
    c.support_tol = j["support_tol"].get<double>();
  if (j.contains("master_seed")) {
    if (j["master_seed"].is_string())
      c.master_seed = std::stoull(j["master_seed"].get<std::string>());
    else
      c.master_seed = j["master_seed"].get<std::uint64_t>();
  }
  if (j.contains("mode")) c.mode = run_mode_from_name(j["mode"]);
  if (j.contains("workers")) c.workers = j["workers"].get<int>();
  if (j.contains("gray_levels")) c.gray_levels = j["gray_levels"].get<int>();
  if (j.contains("altproj_max_iters"))
    c.altproj_max_iters = j["altproj_max_iters"].get<int>();
  if (j.contains("altproj_max_restarts"))
    c.altproj_max_restarts = j["altproj_max_restarts"].get<int>();
  if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("solver")) {
    const json& s = j["solver"];
    if (s.contains("feas_tol")) c.solver.feas_tol = s["feas_tol"];
    if (s.contains("gap_tol")) c.solver.gap_tol = s["gap_tol"];
    if (s.contains("max_iters")) c.solver.max_iters = s["max_iters"];
  }
  return c;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_string(text);
}

std::string ExperimentConfig::config_hash() const {
  // exclude execution-only fields so resumed runs hash identically
  ExperimentConfig c = *this;
  c.out_dir.clear();
  c.workers = 1;
  const std::string text = c.to_json_string();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

PhaseRunner::PhaseRunner(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.fill_defaults();
  mask_ = build_disk_mask(cfg_.n_side);
  op_ = build_aniso(mask_);
  iso_ = IsoGradOperator{op_};
  if (!cfg_.out_dir.empty()) {
    fs::create_directories(cfg_.out_dir);
    fs::create_directories(fs::path(cfg_.out_dir) / "cells");
  }
}

int PhaseRunner::nv_suf() {
  if (nv_suf_ > 0) return nv_suf_;
  const int hi =
      std::max(32, *std::max_element(cfg_.view_counts.begin(),
                                     cfg_.view_counts.end()));
  if (!cfg_.out_dir.empty()) {
    const fs::path cache =
        fs::path(cfg_.out_dir) / ("nv_suf_" + std::to_string(cfg_.n_side) +
                                  ".json");
    if (fs::exists(cache)) {
      std::ifstream in(cache);
      json j;
      in >> j;
      if (j.at("n_side") == cfg_.n_side) {
        nv_suf_ = j.at("nv_suf").get<int>();
        return nv_suf_;
      }
    }
    const auto nv = full_rank_reference_views(cfg_.n_side, 1, hi);
    if (!nv)
      throw ConvergenceError("no full-rank view count up to " +
                                 std::to_string(hi),
                             0);
    nv_suf_ = *nv;
    std::ofstream out(cache);
    out << json{{"n_side", cfg_.n_side}, {"nv_suf", nv_suf_}}.dump() << "\n";
    return nv_suf_;
  }
  const auto nv = full_rank_reference_views(cfg_.n_side, 1, hi);
  if (!nv)
    throw ConvergenceError(
        "no full-rank view count up to " + std::to_string(hi), 0);
  nv_suf_ = *nv;
  return nv_suf_;
}

const SparseMat& PhaseRunner::matrix(int n_views) {
  auto it = matrices_.find(n_views);
  if (it == matrices_.end()) {
    it = matrices_
             .emplace(n_views,
                      build_system_matrix(
                          FanBeamGeometry::standard(cfg_.n_side, n_views),
                          mask_))
             .first;
  }
  return it->second;
}

std::uint64_t PhaseRunner::instance_seed(int kappa_idx, int instance) const {
  return derive_seed(cfg_.master_seed, class_seed_id(cfg_.image_class),
                     static_cast<std::uint64_t>(kappa_idx),
                     static_cast<std::uint64_t>(instance));
}

const MaskedImage& PhaseRunner::image(int kappa_idx, int instance) {
  const auto key = std::make_pair(kappa_idx, instance);
  auto it = images_.find(key);
  if (it == images_.end()) {
    GeneratorConfig gen;
    gen.cls = cfg_.image_class;
    gen.k = k_from_kappa(cfg_.kappas[kappa_idx], mask_.n);
    gen.gray_levels = cfg_.gray_levels;
    gen.max_iters = cfg_.altproj_max_iters;
    gen.max_restarts = cfg_.altproj_max_restarts;
    gen.seed = instance_seed(kappa_idx, instance);
    it = images_
             .emplace(key, std::make_unique<MaskedImage>(
                               generate_image(mask_, op_, gen)))
             .first;
  }
  return *it->second;
}

InstanceOutcome PhaseRunner::run_instance(int kappa_idx, int instance,
                                          int n_views) {
  InstanceOutcome out;
  try {
    const MaskedImage& img = image(kappa_idx, instance);
    const SparseMat& a = matrix(n_views);
    const Vec b = a * img.values;

    if (cfg_.mode != RunMode::Uniqueness) {
      out.ran_recon = true;
      ReconResult rec;
      switch (cfg_.prior) {
        case Prior::L1: rec = reconstruct_l1(a, b, cfg_.solver); break;
        case Prior::ATV: rec = reconstruct_atv(a, op_, b, cfg_.solver); break;
        case Prior::ITV: rec = reconstruct_itv(a, iso_, b, cfg_.solver); break;
      }
      out.recon_seconds = rec.wall_seconds;
      if (rec.solver.optimal()) {
        const RecoveryDecision d =
            decide_recovery(rec.x, img.values, cfg_.recovery_epsilon);
        out.recovered = d.recovered;
        out.rel_error = d.relative_error;
      } else {
        out.failed = true;
        out.error = "reconstruction: " + rec.solver.message;
      }
    }
    if (cfg_.mode != RunMode::Reconstruction) {
      out.ran_cert = true;
      CertOptions copts;
      copts.epsilon = cfg_.cert_epsilon;
      copts.support_tol = cfg_.support_tol;
      copts.solver = cfg_.solver;
      const CertificateVerdict v =
          test_uniqueness(cfg_.prior, a, op_, img.values, copts);
      out.verdict = v.verdict;
      out.t_star = v.t_star;
      out.rank_check = v.rank_check;
      out.cert_seconds = v.wall_seconds();
      if (v.solver_status == SolveStatus::NumericalFailure) {
        out.failed = true;
        out.error = "certificate: " + v.note;
      }
    }
  } catch (const std::exception& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

std::string PhaseRunner::cell_checkpoint_path(int kappa_idx,
                                              int n_views) const {
  if (cfg_.out_dir.empty()) return {};
  return (fs::path(cfg_.out_dir) / "cells" /
          ("cell_" + cfg_.config_hash().substr(0, 8) + "_k" +
           std::to_string(kappa_idx) + "_v" + std::to_string(n_views) +
           ".json"))
      .string();
}

CellResult PhaseRunner::run_cell(int kappa_idx, int n_views) {
  CellResult cell;
  cell.kappa = cfg_.kappas[kappa_idx];
  cell.k = k_from_kappa(cell.kappa, mask_.n);
  cell.n_v = n_views;
  cell.instances = cfg_.instances;

  const std::string ckpt = cell_checkpoint_path(kappa_idx, n_views);
  if (!ckpt.empty() && fs::exists(ckpt)) {
    std::ifstream in(ckpt);
    json j;
    in >> j;
    if (j.at("instances").get<int>() == cfg_.instances) {
      cell.outcomes.clear();
      for (const json& oj : j.at("outcomes"))
        cell.outcomes.push_back(outcome_from_json(oj));
      for (const InstanceOutcome& o : cell.outcomes) {
        cell.recon_successes += o.recovered ? 1 : 0;
        cell.cert_uniques += o.verdict == Verdict::Unique ? 1 : 0;
        cell.failures += o.failed ? 1 : 0;
      }
      return cell;
    }
  }

  // generate instances serially (cache insertions), then evaluate in
  // parallel; identical images are reused across every view count
  matrix(n_views);
  for (int i = 0; i < cfg_.instances; ++i) {
    try {
      image(kappa_idx, i);
    } catch (const std::exception&) {
      // recorded per instance below
    }
  }
  cell.outcomes.resize(cfg_.instances);
  parallel_for(cfg_.workers, cfg_.instances, [&](int i) {
    cell.outcomes[i] = run_instance(kappa_idx, i, n_views);
  });
  for (const InstanceOutcome& o : cell.outcomes) {
    cell.recon_successes += o.recovered ? 1 : 0;
    cell.cert_uniques += o.verdict == Verdict::Unique ? 1 : 0;
    cell.failures += o.failed ? 1 : 0;
  }

  if (!ckpt.empty()) {
    json j;
    j["kappa"] = cell.kappa;
    j["k"] = cell.k;
    j["n_v"] = cell.n_v;
    j["instances"] = cell.instances;
    json arr = json::array();
    for (const InstanceOutcome& o : cell.outcomes)
      arr.push_back(outcome_to_json(o));
    j["outcomes"] = std::move(arr);
    std::ofstream out(ckpt);
    out << j.dump() << "\n";
  }
  return cell;
}

PhaseDiagram PhaseRunner::run_diagram() {
  PhaseDiagram d;
  d.config = cfg_;
  d.nv_suf = nv_suf();
  if (!cfg_.out_dir.empty())
    write_run_metadata(cfg_, d.nv_suf,
                       (fs::path(cfg_.out_dir) / "metadata.json").string());
  for (std::size_t ki = 0; ki < cfg_.kappas.size(); ++ki)
    for (int nv : cfg_.view_counts)
      d.cells.push_back(run_cell(static_cast<int>(ki), nv));
  return d;
}

std::vector<std::vector<int>> PhaseDiagram::minimal_sufficient_views(
    bool by_cert) const {
  const int nk = static_cast<int>(config.kappas.size());
  const int nvs = static_cast<int>(config.view_counts.size());
  std::vector<std::vector<int>> out(nk,
                                    std::vector<int>(config.instances, -1));
  for (int ki = 0; ki < nk; ++ki) {
    for (int inst = 0; inst < config.instances; ++inst) {
      int stable_from = -1;
      for (int vi = nvs - 1; vi >= 0; --vi) {
        const InstanceOutcome& o = cell(ki, vi).outcomes[inst];
        const bool success =
            by_cert ? o.verdict == Verdict::Unique : o.recovered;
        if (!success) break;
        stable_from = config.view_counts[vi];
      }
      out[ki][inst] = stable_from;
    }
  }
  return out;
}

TransitionCurve transition_curve(const PhaseDiagram& diagram, bool by_cert) {
  TransitionCurve curve;
  curve.nv_suf = diagram.nv_suf;
  curve.by_cert = by_cert;
  const auto mins = diagram.minimal_sufficient_views(by_cert);
  for (std::size_t ki = 0; ki < diagram.config.kappas.size(); ++ki) {
    TransitionPoint p;
    p.kappa = diagram.config.kappas[ki];
    p.instances = diagram.config.instances;
    std::vector<double> mus;
    bool all_defined = true;
    for (int nv : mins[ki]) {
      if (nv < 0) {
        all_defined = false;
        break;
      }
      mus.push_back(static_cast<double>(nv) / diagram.nv_suf);
    }
    p.defined = all_defined;
    if (all_defined && !mus.empty()) {
      const MeanStd ms = mean_std(mus);
      p.mean_mu = ms.mean;
      p.ci99_halfwidth = t_confidence_halfwidth(mus, 0.99);
      p.all_recovered_mu = *std::max_element(mus.begin(), mus.end());
    }
    curve.points.push_back(p);
  }
  return curve;
}

std::vector<BenchRow> bench_modes(const ExperimentConfig& cfg,
                                  int repetitions) {
  ExperimentConfig c = cfg;
  c.mode = RunMode::Both;
  c.workers = 1;  // single-threaded timing
  c.instances = std::max(c.instances, repetitions);
  PhaseRunner runner(c);
  std::vector<BenchRow> rows;
  for (std::size_t ki = 0; ki < runner.config().kappas.size(); ++ki) {
    for (int nv : runner.config().view_counts) {
      BenchRow row;
      row.kappa = runner.config().kappas[ki];
      row.n_v = nv;
      row.reps = repetitions;
      std::vector<double> rt, ct;
      for (int rep = 0; rep < repetitions; ++rep) {
        const InstanceOutcome o =
            runner.run_instance(static_cast<int>(ki), rep, nv);
        rt.push_back(o.recon_seconds);
        ct.push_back(o.cert_seconds);
        if (o.ran_cert && !o.rank_check) ++row.rank_failures;
      }
      const MeanStd rs = mean_std(rt), cs = mean_std(ct);
      row.recon_mean_s = rs.mean;
      row.recon_std_s = rs.stddev;
      row.cert_mean_s = cs.mean;
      row.cert_std_s = cs.stddev;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_diagram_csv(const PhaseDiagram& diagram, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw InvalidArgument("cannot open for writing: " + path);
  std::fprintf(f,
               "kappa,k,n_v,mu,instances,recovered,unique,fraction_recon,"
               "fraction_cert,failures\n");
  for (const CellResult& c : diagram.cells)
    std::fprintf(f, "%.6g,%ld,%d,%.6g,%d,%d,%d,%.6g,%.6g,%d\n", c.kappa, c.k,
                 c.n_v, static_cast<double>(c.n_v) / diagram.nv_suf,
                 c.instances, c.recon_successes, c.cert_uniques,
                 c.fraction_recon(), c.fraction_cert(), c.failures);
  std::fclose(f);
}

void write_transition_csv(const TransitionCurve& curve,
                          const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw InvalidArgument("cannot open for writing: " + path);
  std::fprintf(
      f, "kappa,instances,defined,mean_mu,ci99_halfwidth,all_recovered_mu\n");
  for (const TransitionPoint& p : curve.points)
    std::fprintf(f, "%.6g,%d,%d,%.6g,%.6g,%.6g\n", p.kappa, p.instances,
                 p.defined ? 1 : 0, p.mean_mu, p.ci99_halfwidth,
                 p.all_recovered_mu);
  std::fclose(f);
}

void write_bench_csv(const ExperimentConfig& cfg,
                     const std::vector<BenchRow>& rows,
                     const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw InvalidArgument("cannot open for writing: " + path);
  std::fprintf(f,
               "prior,class,kappa,n_v,reps,recon_mean_s,recon_std_s,"
               "cert_mean_s,cert_std_s,rank_failures\n");
  for (const BenchRow& r : rows)
    std::fprintf(f, "%s,%s,%.6g,%d,%d,%.6g,%.6g,%.6g,%.6g,%d\n",
                 prior_name(cfg.prior), image_class_name(cfg.image_class),
                 r.kappa, r.n_v, r.reps, r.recon_mean_s, r.recon_std_s,
                 r.cert_mean_s, r.cert_std_s, r.rank_failures);
  std::fclose(f);
}

void write_run_metadata(const ExperimentConfig& cfg, int nv_suf,
                        const std::string& path) {
  json j;
  j["config"] = json::parse(cfg.to_json_string());
  j["config_hash"] = cfg.config_hash();
  j["nv_suf"] = nv_suf;
  j["ci_method"] =
      "two-sided Student-t over per-instance minimal sufficient relative "
      "sampling";
  j["minimal_sufficient_rule"] =
      "smallest tested view count from which the instance stays "
      "recovered/certified through all larger tested counts";
  j["never_recovered_policy"] =
      "kappa flagged and excluded from the transition curve";
  j["failure_policy"] =
      "solver or generator failures count as non-recovered/indeterminate";
  j["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                       std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

void write_diagram_svg(const PhaseDiagram& diagram, bool by_cert,
                       const std::string& path) {
  std::vector<double> mus;
  for (int nv : diagram.config.view_counts)
    mus.push_back(static_cast<double>(nv) / diagram.nv_suf);
  std::vector<std::vector<double>> values(
      diagram.config.kappas.size(),
      std::vector<double>(mus.size(), 0.0));
  for (std::size_t ki = 0; ki < diagram.config.kappas.size(); ++ki)
    for (std::size_t vi = 0; vi < mus.size(); ++vi) {
      const CellResult& c = diagram.cell(static_cast<int>(ki),
                                         static_cast<int>(vi));
      values[ki][vi] = by_cert ? c.fraction_cert() : c.fraction_recon();
    }
  const std::string title =
      std::string(prior_name(diagram.config.prior)) + " / " +
      image_class_name(diagram.config.image_class) +
      (by_cert ? " (uniqueness test)" : " (reconstruction)");
  write_heatmap_svg(diagram.config.kappas, mus, values, title, path);
}

void write_transition_svg(const std::vector<TransitionCurve>& curves,
                          const std::vector<std::string>& labels,
                          const std::string& path) {
  std::vector<CurveSeries> series;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    CurveSeries s;
    s.label = i < labels.size() ? labels[i] : "curve";
    for (const TransitionPoint& p : curves[i].points) {
      if (!p.defined) continue;
      s.x.push_back(p.kappa);
      s.y.push_back(p.mean_mu);
      s.err.push_back(p.ci99_halfwidth);
    }
    series.push_back(std::move(s));
  }
  write_curves_svg(series, "relative sparsity", "sufficient relative sampling",
                   "average sufficient sampling with 99% confidence intervals",
                   path);
}

}  // namespace ctrecov
