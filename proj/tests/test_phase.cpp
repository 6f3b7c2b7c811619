#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ctrecov/phase.hpp"
#include "ctrecov/stats.hpp"

using namespace ctrecov;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n_side = 10;
  cfg.prior = Prior::L1;
  cfg.image_class = ImageClass::Spikes;
  cfg.kappas = {0.1, 0.4};
  cfg.view_counts = {2, 3, 4, 5, 6};
  cfg.instances = 5;
  cfg.master_seed = 11;
  cfg.mode = RunMode::Both;
  return cfg;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ctrecov_phase_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("student-t critical values match tables") {
  CHECK(student_t_critical(0.99, 99) == doctest::Approx(2.6264).epsilon(1e-4));
  CHECK(student_t_critical(0.99, 1) == doctest::Approx(63.657).epsilon(1e-3));
  CHECK(student_t_critical(0.95, 10) == doctest::Approx(2.2281).epsilon(1e-4));
}

TEST_CASE("kappa to k mapping at reference sizes") {
  CHECK(k_from_kappa(0.3, 3228) == 968);
  CHECK(k_from_kappa(0.0, 812) == 0);
  CHECK(k_from_kappa(1.9, 812) == 1543);
}

TEST_CASE("default grids") {
  const auto l1 = default_kappas(Prior::L1);
  CHECK(l1.front() == 0.025);
  CHECK(l1.back() == doctest::Approx(0.9));
  CHECK(l1.size() == 11);
  const auto atv = default_kappas(Prior::ATV);
  CHECK(atv.size() == 21);
  CHECK(atv.back() == doctest::Approx(1.9));
  CHECK(default_view_counts().size() == 32);
}

TEST_CASE("diagram runs are deterministic and reuse instances") {
  PhaseRunner r1(small_config());
  PhaseRunner r2(small_config());
  const PhaseDiagram d1 = r1.run_diagram();
  const PhaseDiagram d2 = r2.run_diagram();
  REQUIRE(d1.cells.size() == d2.cells.size());
  for (std::size_t i = 0; i < d1.cells.size(); ++i) {
    CHECK(d1.cells[i].recon_successes == d2.cells[i].recon_successes);
    CHECK(d1.cells[i].cert_uniques == d2.cells[i].cert_uniques);
    for (int inst = 0; inst < d1.config.instances; ++inst)
      CHECK(d1.cells[i].outcomes[inst].verdict ==
            d2.cells[i].outcomes[inst].verdict);
  }
  // the image for (kappa, instance) is byte-identical across runners
  for (int inst = 0; inst < 5; ++inst)
    CHECK(r1.image(1, inst).values == r2.image(1, inst).values);
}

TEST_CASE("single-cell diagram equals run_cell") {
  ExperimentConfig cfg = small_config();
  cfg.kappas = {0.2};
  cfg.view_counts = {4};
  PhaseRunner runner(cfg);
  const PhaseDiagram d = runner.run_diagram();
  REQUIRE(d.cells.size() == 1);
  PhaseRunner runner2(cfg);
  const CellResult c = runner2.run_cell(0, 4);
  CHECK(d.cells[0].recon_successes == c.recon_successes);
  CHECK(d.cells[0].cert_uniques == c.cert_uniques);
}

TEST_CASE("full sampling cells recover every instance") {
  ExperimentConfig cfg = small_config();
  PhaseRunner runner(cfg);
  const int nv_suf = runner.nv_suf();
  cfg.view_counts = {nv_suf};
  PhaseRunner full(cfg);
  const PhaseDiagram d = full.run_diagram();
  for (std::size_t ki = 0; ki < cfg.kappas.size(); ++ki) {
    CHECK(d.cell(static_cast<int>(ki), 0).fraction_recon() == 1.0);
    CHECK(d.cell(static_cast<int>(ki), 0).fraction_cert() == 1.0);
  }
}

TEST_CASE("minimal sufficient views and the transition curve") {
  const ExperimentConfig cfg = small_config();
  PhaseRunner runner(cfg);
  const PhaseDiagram d = runner.run_diagram();
  const auto mins = d.minimal_sufficient_views(false);

  // recompute one instance by hand
  for (int inst = 0; inst < cfg.instances; ++inst) {
    int expect = -1;
    for (int vi = static_cast<int>(cfg.view_counts.size()) - 1; vi >= 0;
         --vi) {
      if (!d.cell(0, vi).outcomes[inst].recovered) break;
      expect = cfg.view_counts[vi];
    }
    CHECK(mins[0][inst] == expect);
  }

  const TransitionCurve curve = transition_curve(d, false);
  REQUIRE(curve.points.size() == cfg.kappas.size());
  for (std::size_t ki = 0; ki < curve.points.size(); ++ki) {
    const TransitionPoint& p = curve.points[ki];
    if (!p.defined) continue;
    std::vector<double> mus;
    for (int nv : mins[ki]) mus.push_back(double(nv) / d.nv_suf);
    const MeanStd ms = mean_std(mus);
    CHECK(p.mean_mu == doctest::Approx(ms.mean));
    CHECK(p.all_recovered_mu ==
          doctest::Approx(*std::max_element(mus.begin(), mus.end())));
    if (ms.stddev == 0.0) CHECK(p.ci99_halfwidth == 0.0);
  }
}

TEST_CASE("identical minimal views give a zero-width confidence interval") {
  ExperimentConfig cfg = small_config();
  cfg.kappas = {0.1};
  PhaseRunner probe(cfg);
  const int nv_suf = probe.nv_suf();
  // with only full-rank cells every instance recovers at the same view count
  cfg.view_counts = {nv_suf, nv_suf + 1};
  PhaseRunner runner(cfg);
  const TransitionCurve curve = transition_curve(runner.run_diagram(), false);
  REQUIRE(curve.points.size() == 1);
  CHECK(curve.points[0].defined);
  CHECK(curve.points[0].ci99_halfwidth == 0.0);
  CHECK(curve.points[0].mean_mu == doctest::Approx(1.0));
}

TEST_CASE("never-recovered instances flag the kappa") {
  ExperimentConfig cfg = small_config();
  cfg.kappas = {0.8};
  cfg.view_counts = {1};  // far below the transition
  PhaseRunner runner(cfg);
  const TransitionCurve curve = transition_curve(runner.run_diagram(), false);
  REQUIRE(curve.points.size() == 1);
  CHECK(!curve.points[0].defined);
}

TEST_CASE("checkpoints are written and drive resumption") {
  TempDir dir;
  ExperimentConfig cfg = small_config();
  cfg.kappas = {0.2};
  cfg.view_counts = {3};
  cfg.out_dir = dir.path.string();
  PhaseRunner runner(cfg);
  const PhaseDiagram d1 = runner.run_diagram();
  REQUIRE(fs::exists(dir.path / "metadata.json"));

  // exactly one cell checkpoint
  int files = 0;
  fs::path cell_file;
  for (const auto& e : fs::directory_iterator(dir.path / "cells")) {
    cell_file = e.path();
    ++files;
  }
  REQUIRE(files == 1);

  // tamper with the checkpoint; a resumed run must trust it
  {
    std::ifstream in(cell_file);
    nlohmann::json j;
    in >> j;
    for (auto& o : j["outcomes"]) o["recovered"] = false;
    std::ofstream out(cell_file);
    out << j.dump();
  }
  PhaseRunner resumed(cfg);
  const PhaseDiagram d2 = resumed.run_diagram();
  CHECK(d1.cells[0].recon_successes > 0);
  CHECK(d2.cells[0].recon_successes == 0);
}

TEST_CASE("config json round trip and hashing") {
  ExperimentConfig cfg = small_config();
  cfg.out_dir = "/tmp/somewhere";
  cfg.workers = 7;
  const ExperimentConfig back =
      ExperimentConfig::from_json_string(cfg.to_json_string());
  CHECK(back.n_side == cfg.n_side);
  CHECK(back.kappas == cfg.kappas);
  CHECK(back.view_counts == cfg.view_counts);
  CHECK(back.master_seed == cfg.master_seed);
  CHECK(back.mode == cfg.mode);

  // execution-only fields do not change the experiment identity
  ExperimentConfig moved = cfg;
  moved.out_dir = "/tmp/elsewhere";
  moved.workers = 1;
  CHECK(moved.config_hash() == cfg.config_hash());
  ExperimentConfig different = cfg;
  different.master_seed += 1;
  CHECK(different.config_hash() != cfg.config_hash());
}

TEST_CASE("bench rows carry timings for both modes") {
  ExperimentConfig cfg = small_config();
  cfg.kappas = {0.4};
  cfg.view_counts = {2, 5};
  const std::vector<BenchRow> rows = bench_modes(cfg, 3);
  REQUIRE(rows.size() == 2);
  for (const BenchRow& r : rows) {
    CHECK(r.reps == 3);
    CHECK(r.recon_mean_s > 0.0);
    CHECK(r.cert_mean_s > 0.0);
  }
  // rank check fails deep in the undersampled regime, so the LP is skipped
  CHECK(rows[0].rank_failures > 0);
}

TEST_CASE("csv and svg outputs are written") {
  TempDir dir;
  ExperimentConfig cfg = small_config();
  PhaseRunner runner(cfg);
  const PhaseDiagram d = runner.run_diagram();
  const std::string base = dir.path.string();
  write_diagram_csv(d, base + "/diagram.csv");
  write_transition_csv(transition_curve(d, false), base + "/curve.csv");
  write_diagram_svg(d, false, base + "/diagram.svg");
  write_transition_svg({transition_curve(d, false)}, {"recon"},
                       base + "/curve.svg");
  write_run_metadata(cfg, d.nv_suf, base + "/meta.json");
  for (const char* name : {"diagram.csv", "curve.csv", "diagram.svg",
                           "curve.svg", "meta.json"})
    CHECK(fs::file_size(dir.path / name) > 0);

  std::ifstream in(base + "/diagram.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header ==
        "kappa,k,n_v,mu,instances,recovered,unique,fraction_recon,"
        "fraction_cert,failures");
}
