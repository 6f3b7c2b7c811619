#include "ctrecov/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "ctrecov/phase.hpp"
#include "ctrecov/rank.hpp"
#include "ctrecov/svg.hpp"

namespace ctrecov {

namespace {

namespace fs = std::filesystem;

SparseMat load_or_build_matrix(const std::string& matrix_path, int n_side,
                               int views, const DiskMask& mask) {
  if (!matrix_path.empty()) return read_matrix_market(matrix_path);
  if (views < 1)
    throw InvalidArgument("either --matrix or --views is required");
  return build_system_matrix(FanBeamGeometry::standard(n_side, views), mask);
}

void write_recon_log(const ReconResult& rec, const RecoveryDecision& dec,
                     const std::string& path) {
  nlohmann::json j;
  j["status"] = solve_status_name(rec.solver.status);
  j["iterations"] = rec.solver.iterations;
  j["gap"] = rec.solver.gap;
  j["rel_gap"] = rec.solver.rel_gap;
  j["primal_res"] = rec.solver.primal_res;
  j["dual_res"] = rec.solver.dual_res;
  j["wall_seconds"] = rec.wall_seconds;
  j["relative_error"] = dec.relative_error;
  j["recovered"] = dec.recovered;
  j["epsilon"] = dec.epsilon;
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

ExperimentConfig config_from_cli(const std::string& config_path) {
  if (config_path.empty()) return {};
  return ExperimentConfig::from_json_file(config_path);
}

PhaseDiagram rerun_from_dir(const std::string& run_dir) {
  const fs::path meta = fs::path(run_dir) / "metadata.json";
  if (!fs::exists(meta))
    throw InvalidArgument("no metadata.json under " + run_dir);
  std::ifstream in(meta);
  nlohmann::json j;
  in >> j;
  ExperimentConfig cfg =
      ExperimentConfig::from_json_string(j.at("config").dump());
  cfg.out_dir = run_dir;  // reuse cell checkpoints
  PhaseRunner runner(cfg);
  return runner.run_diagram();
}

void emit_phase_outputs(const PhaseDiagram& diagram, const std::string& dir) {
  write_diagram_csv(diagram, (fs::path(dir) / "diagram.csv").string());
  if (diagram.config.mode != RunMode::Uniqueness) {
    write_diagram_svg(diagram, false,
                      (fs::path(dir) / "diagram_recon.svg").string());
    const TransitionCurve c = transition_curve(diagram, false);
    write_transition_csv(c, (fs::path(dir) / "transition_recon.csv").string());
    write_transition_svg({c}, {"reconstruction"},
                         (fs::path(dir) / "transition_recon.svg").string());
  }
  if (diagram.config.mode != RunMode::Reconstruction) {
    write_diagram_svg(diagram, true,
                      (fs::path(dir) / "diagram_cert.svg").string());
    const TransitionCurve c = transition_curve(diagram, true);
    write_transition_csv(c, (fs::path(dir) / "transition_cert.csv").string());
    write_transition_svg({c}, {"uniqueness test"},
                         (fs::path(dir) / "transition_cert.svg").string());
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"fan-beam CT sparse-recovery phase study"};
  app.require_subcommand(1);

  // ---- matrix ----
  auto* matrix_cmd =
      app.add_subcommand("matrix", "build and save a fan-beam system matrix");
  int m_nside = 64, m_views = 26;
  double m_fan = 28.07, m_start = 0.0;
  std::string m_out;
  matrix_cmd->add_option("--nside", m_nside, "grid side in pixels");
  matrix_cmd->add_option("--views", m_views, "number of projection views");
  matrix_cmd->add_option("--fan-angle", m_fan, "fan angle in degrees");
  matrix_cmd->add_option("--start-angle", m_start,
                         "angle of the first view in degrees");
  matrix_cmd->add_option("--out", m_out, "Matrix Market output path")
      ->required();

  // ---- mask ----
  auto* mask_cmd = app.add_subcommand("mask", "build and save the disk mask");
  int k_nside = 64;
  std::string k_out;
  mask_cmd->add_option("--nside", k_nside, "grid side in pixels");
  mask_cmd->add_option("--out", k_out, "JSON output path")->required();

  // ---- gen ----
  auto* gen_cmd = app.add_subcommand("gen", "generate a sparse test image");
  std::string g_class = "spikes", g_out, g_pgm, g_svg;
  int g_nside = 32, g_levels = 40, g_iters = 3000, g_restarts = 10;
  double g_kappa = -1.0;
  long g_k = -1;
  std::uint64_t g_seed = 1;
  gen_cmd->add_option("--class", g_class,
                      "spikes | signed-spikes | truncated-uniform | "
                      "altproj-aniso | altproj-iso | altproj-nonneg");
  gen_cmd->add_option("--nside", g_nside, "grid side in pixels");
  gen_cmd->add_option("--kappa", g_kappa, "relative sparsity (k = "
                                          "round(kappa * n))");
  gen_cmd->add_option("--k", g_k, "absolute sparsity target");
  gen_cmd->add_option("--seed", g_seed, "generator seed");
  gen_cmd->add_option("--levels", g_levels,
                      "gray levels (truncated-uniform)");
  gen_cmd->add_option("--max-iters", g_iters,
                      "alternating-projection iteration cap");
  gen_cmd->add_option("--restarts", g_restarts,
                      "alternating-projection restarts");
  gen_cmd->add_option("--out", g_out, "image CSV output path")->required();
  gen_cmd->add_option("--pgm", g_pgm, "also render a PGM preview");
  gen_cmd->add_option("--svg", g_svg, "also render an SVG preview");

  // ---- recon ----
  auto* recon_cmd =
      app.add_subcommand("recon", "reconstruct from exact data of an image");
  std::string r_prior = "l1", r_matrix, r_image, r_out, r_log;
  int r_views = -1;
  recon_cmd->add_option("--prior", r_prior, "l1 | atv | itv");
  recon_cmd->add_option("--matrix", r_matrix, "Matrix Market system matrix");
  recon_cmd->add_option("--views", r_views,
                        "build the matrix with this view count");
  recon_cmd->add_option("--image", r_image, "ground-truth image CSV")
      ->required();
  recon_cmd->add_option("--out", r_out, "reconstruction CSV output")
      ->required();
  recon_cmd->add_option("--log", r_log, "JSON solve log");

  // ---- unique ----
  auto* uniq_cmd =
      app.add_subcommand("unique", "run the solution-uniqueness test");
  std::string u_prior = "l1", u_matrix, u_image, u_out;
  int u_views = -1;
  double u_eps = 1e-5;
  bool u_dump = false;
  uniq_cmd->add_option("--prior", u_prior, "l1 | atv | itv");
  uniq_cmd->add_option("--matrix", u_matrix, "Matrix Market system matrix");
  uniq_cmd->add_option("--views", u_views,
                       "build the matrix with this view count");
  uniq_cmd->add_option("--image", u_image, "candidate image CSV")->required();
  uniq_cmd->add_option("--epsilon", u_eps, "strictness margin");
  uniq_cmd->add_option("--out", u_out, "verdict JSON output")->required();
  uniq_cmd->add_flag("--dump-certificate", u_dump,
                     "include certificate vectors in the JSON");

  // ---- phase ----
  auto* phase_cmd = app.add_subcommand(
      "phase", "run a phase-diagram experiment over sparsity and views");
  std::string p_config, p_out, p_mode, p_prior, p_class;
  int p_workers = -1, p_instances = -1, p_nside = -1;
  std::uint64_t p_seed = 0;
  bool p_seed_set = false;
  phase_cmd->add_option("--config", p_config, "experiment JSON config");
  phase_cmd->add_option("--out", p_out, "output directory")->required();
  phase_cmd->add_option("--mode", p_mode,
                        "reconstruction | uniqueness | both");
  phase_cmd->add_option("--workers", p_workers, "parallel workers");
  phase_cmd->add_option("--instances", p_instances, "instances per kappa");
  phase_cmd->add_option("--nside", p_nside, "grid side in pixels");
  phase_cmd->add_option("--prior", p_prior, "l1 | atv | itv");
  phase_cmd->add_option("--class", p_class, "image class");
  phase_cmd
      ->add_option_function<std::uint64_t>(
          "--seed",
          [&](std::uint64_t s) {
            p_seed = s;
            p_seed_set = true;
          },
          "master seed")
      ->expected(1);

  // ---- curve ----
  auto* curve_cmd = app.add_subcommand(
      "curve", "transition curves from a completed phase run");
  std::string c_run;
  curve_cmd->add_option("--run", c_run, "phase output directory")->required();

  // ---- bench ----
  auto* bench_cmd = app.add_subcommand(
      "bench", "single-core timing of reconstruction vs uniqueness test");
  std::string b_config, b_out;
  int b_reps = 10;
  bench_cmd->add_option("--config", b_config, "experiment JSON config")
      ->required();
  bench_cmd->add_option("--out", b_out, "output directory")->required();
  bench_cmd->add_option("--reps", b_reps, "repetitions per cell");

  // ---- plot ----
  auto* plot_cmd = app.add_subcommand("plot", "render SVG figures");
  std::string pl_run, pl_image, pl_svg, pl_pgm;
  plot_cmd->add_option("--run", pl_run,
                       "phase output directory (diagram + curves)");
  plot_cmd->add_option("--image", pl_image, "image CSV to render");
  plot_cmd->add_option("--svg", pl_svg, "SVG output for --image");
  plot_cmd->add_option("--pgm", pl_pgm, "PGM output for --image");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*matrix_cmd) {
      const DiskMask mask = build_disk_mask(m_nside);
      FanBeamGeometry geom =
          FanBeamGeometry::standard(m_nside, m_views, m_start);
      geom.fan_angle_deg = m_fan;
      const SparseMat a = build_system_matrix(geom, mask);
      write_matrix_market(a, m_out);
      std::printf("matrix %ld x %ld (%ld nonzeros) -> %s\n",
                  static_cast<long>(a.rows()), static_cast<long>(a.cols()),
                  static_cast<long>(a.nonZeros()), m_out.c_str());
    } else if (*mask_cmd) {
      const DiskMask mask = build_disk_mask(k_nside);
      write_mask_json(mask, k_out);
      std::printf("mask n_side=%d n=%d -> %s\n", k_nside, mask.n,
                  k_out.c_str());
    } else if (*gen_cmd) {
      const DiskMask mask = build_disk_mask(g_nside);
      const AnisoGradOperator op = build_aniso(mask);
      GeneratorConfig cfg;
      cfg.cls = image_class_from_name(g_class);
      if (g_k >= 0 && g_kappa >= 0)
        throw InvalidArgument("give either --k or --kappa, not both");
      if (g_k >= 0)
        cfg.k = g_k;
      else if (g_kappa >= 0)
        cfg.k = k_from_kappa(g_kappa, mask.n);
      else
        throw InvalidArgument("one of --k or --kappa is required");
      cfg.gray_levels = g_levels;
      cfg.max_iters = g_iters;
      cfg.max_restarts = g_restarts;
      cfg.seed = g_seed;
      const MaskedImage img = generate_image(mask, op, cfg);
      write_image_csv(img, g_out);
      if (!g_pgm.empty()) write_image_pgm(img, mask, g_pgm);
      if (!g_svg.empty()) write_image_svg(img, mask, g_svg);
      std::printf("image class=%s n=%d k=%ld seed=%llu -> %s\n",
                  image_class_name(img.cls), mask.n, img.target_k,
                  static_cast<unsigned long long>(img.seed), g_out.c_str());
    } else if (*recon_cmd) {
      const MaskedImage truth = read_image_csv(r_image);
      const DiskMask mask = build_disk_mask(truth.n_side);
      const AnisoGradOperator op = build_aniso(mask);
      const SparseMat a =
          load_or_build_matrix(r_matrix, truth.n_side, r_views, mask);
      if (a.cols() != mask.n)
        throw InvalidArgument("matrix columns do not match the image mask");
      const Prior prior = prior_from_name(r_prior);
      const Vec b = a * truth.values;
      ReconResult rec;
      switch (prior) {
        case Prior::L1: rec = reconstruct_l1(a, b); break;
        case Prior::ATV: rec = reconstruct_atv(a, op, b); break;
        case Prior::ITV:
          rec = reconstruct_itv(a, IsoGradOperator{op}, b);
          break;
      }
      MaskedImage out = truth;
      out.values = rec.x;
      write_image_csv(out, r_out);
      const RecoveryDecision dec = decide_recovery(
          rec.x, truth.values, default_recovery_epsilon(prior));
      if (!r_log.empty()) write_recon_log(rec, dec, r_log);
      std::printf(
          "recon prior=%s status=%s rel_error=%.3e recovered=%s -> %s\n",
          prior_name(prior), solve_status_name(rec.solver.status),
          dec.relative_error, dec.recovered ? "yes" : "no", r_out.c_str());
      if (!rec.solver.optimal()) return 1;
    } else if (*uniq_cmd) {
      const MaskedImage img = read_image_csv(u_image);
      const DiskMask mask = build_disk_mask(img.n_side);
      const AnisoGradOperator op = build_aniso(mask);
      const SparseMat a =
          load_or_build_matrix(u_matrix, img.n_side, u_views, mask);
      if (a.cols() != mask.n)
        throw InvalidArgument("matrix columns do not match the image mask");
      const Prior prior = prior_from_name(u_prior);
      CertOptions opts;
      opts.epsilon = u_eps;
      const CertificateVerdict v =
          test_uniqueness(prior, a, op, img.values, opts);
      write_verdict_json(v, prior, u_out, u_dump);
      std::printf("unique prior=%s verdict=%s t_star=%.6g rank=%s -> %s\n",
                  prior_name(prior), verdict_name(v.verdict), v.t_star,
                  v.rank_check ? "ok" : "fail", u_out.c_str());
    } else if (*phase_cmd) {
      ExperimentConfig cfg = config_from_cli(p_config);
      cfg.out_dir = p_out;
      if (!p_mode.empty()) cfg.mode = run_mode_from_name(p_mode);
      if (p_workers > 0) cfg.workers = p_workers;
      if (p_instances > 0) cfg.instances = p_instances;
      if (p_nside > 0) cfg.n_side = p_nside;
      if (!p_prior.empty()) cfg.prior = prior_from_name(p_prior);
      if (!p_class.empty()) cfg.image_class = image_class_from_name(p_class);
      if (p_seed_set) cfg.master_seed = p_seed;
      PhaseRunner runner(cfg);
      const PhaseDiagram diagram = runner.run_diagram();
      emit_phase_outputs(diagram, p_out);
      std::printf("phase run complete: %zu cells -> %s\n",
                  diagram.cells.size(), p_out.c_str());
    } else if (*curve_cmd) {
      const PhaseDiagram diagram = rerun_from_dir(c_run);
      emit_phase_outputs(diagram, c_run);
      std::printf("curves -> %s\n", c_run.c_str());
    } else if (*bench_cmd) {
      ExperimentConfig cfg = ExperimentConfig::from_json_file(b_config);
      fs::create_directories(b_out);
      const std::vector<BenchRow> rows = bench_modes(cfg, b_reps);
      write_bench_csv(cfg, rows, (fs::path(b_out) / "timing.csv").string());
      write_run_metadata(cfg, 0,
                         (fs::path(b_out) / "bench_metadata.json").string());
      std::printf("bench: %zu cells -> %s\n", rows.size(), b_out.c_str());
    } else if (*plot_cmd) {
      if (!pl_run.empty()) {
        const PhaseDiagram diagram = rerun_from_dir(pl_run);
        emit_phase_outputs(diagram, pl_run);
        std::printf("figures -> %s\n", pl_run.c_str());
      } else if (!pl_image.empty()) {
        const MaskedImage img = read_image_csv(pl_image);
        const DiskMask mask = build_disk_mask(img.n_side);
        if (pl_svg.empty() && pl_pgm.empty())
          throw InvalidArgument("--image needs --svg and/or --pgm");
        if (!pl_svg.empty()) write_image_svg(img, mask, pl_svg);
        if (!pl_pgm.empty()) write_image_pgm(img, mask, pl_pgm);
        std::printf("image figures written\n");
      } else {
        throw InvalidArgument("plot needs --run or --image");
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ctrecov
