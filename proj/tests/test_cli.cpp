#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "ctrecov/cli.hpp"
#include "ctrecov/imagegen.hpp"
#include "ctrecov/sparse.hpp"

using namespace ctrecov;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("ctrecov_cli_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("help exists for every subcommand") {
  CHECK(run_cli({"--help"}) == 0);
  for (const char* sub : {"matrix", "mask", "gen", "recon", "unique", "phase",
                          "curve", "bench", "plot"})
    CHECK(run_cli({sub, "--help"}) == 0);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli({"gen", "--bogus-flag"}) == 2);
  CHECK(run_cli({"no-such-command"}) == 2);
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"matrix"}) == 2);  // missing required --out
}

TEST_CASE("domain errors exit with code 1") {
  TempDir dir;
  CHECK(run_cli({"mask", "--nside", "1", "--out", dir.file("m.json")}) == 1);
  CHECK(run_cli({"gen", "--class", "nope", "--nside", "8", "--k", "3",
                 "--out", dir.file("img.csv")}) == 1);
  CHECK(run_cli({"recon", "--image", dir.file("absent.csv"), "--out",
                 dir.file("x.csv")}) == 1);
}

TEST_CASE("matrix subcommand writes the paper-scale dimensions") {
  TempDir dir;
  const std::string out = dir.file("a64.mtx");
  REQUIRE(run_cli({"matrix", "--nside", "64", "--views", "26", "--out",
                   out}) == 0);
  const SparseMat a = read_matrix_market(out);
  CHECK(a.rows() == 3328);
  CHECK(a.cols() == 3228);

  // round trip: saved and reloaded structure is identical
  const std::string out2 = dir.file("a64b.mtx");
  write_matrix_market(a, out2);
  const SparseMat b = read_matrix_market(out2);
  CHECK(b.nonZeros() == a.nonZeros());
}

TEST_CASE("gen with kappa zero emits the all-zero image") {
  TempDir dir;
  const std::string out = dir.file("zero.csv");
  REQUIRE(run_cli({"gen", "--class", "spikes", "--nside", "32", "--kappa",
                   "0", "--seed", "1", "--out", out}) == 0);
  const MaskedImage img = read_image_csv(out);
  CHECK(img.values.size() == 812);
  CHECK(img.values.norm() == 0.0);
}

TEST_CASE("recon and unique agree on an easy instance") {
  TempDir dir;
  const std::string img = dir.file("img.csv");
  REQUIRE(run_cli({"gen", "--class", "spikes", "--nside", "12", "--k", "10",
                   "--seed", "2", "--out", img}) == 0);
  REQUIRE(run_cli({"recon", "--prior", "l1", "--views", "6", "--image", img,
                   "--out", dir.file("xhat.csv"), "--log",
                   dir.file("log.json")}) == 0);
  REQUIRE(run_cli({"unique", "--prior", "l1", "--views", "6", "--image", img,
                   "--out", dir.file("v.json")}) == 0);
  std::ifstream log(dir.file("log.json"));
  std::string text((std::istreambuf_iterator<char>(log)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("\"recovered\": true") != std::string::npos);
  std::ifstream vj(dir.file("v.json"));
  std::string vtext((std::istreambuf_iterator<char>(vj)),
                    std::istreambuf_iterator<char>());
  CHECK(vtext.find("\"verdict\": \"unique\"") != std::string::npos);
}

TEST_CASE("phase, curve and plot round trip through a run directory") {
  TempDir dir;
  const std::string cfg = dir.file("cfg.json");
  {
    std::ofstream out(cfg);
    out << R"({"n_side": 10, "prior": "l1", "image_class": "spikes",
               "kappas": [0.15], "view_counts": [2, 4, 6],
               "instances": 4, "master_seed": 3, "mode": "both"})";
  }
  const std::string run = dir.file("run");
  REQUIRE(run_cli({"phase", "--config", cfg, "--out", run}) == 0);
  CHECK(fs::exists(fs::path(run) / "diagram.csv"));
  CHECK(fs::exists(fs::path(run) / "metadata.json"));
  CHECK(fs::exists(fs::path(run) / "diagram_recon.svg"));

  // full-rank endpoint reaches fraction 1.0
  std::ifstream in(fs::path(run) / "diagram.csv");
  std::string line, last;
  std::getline(in, line);  // header
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  CHECK(last.find(",1,") != std::string::npos);  // fraction columns

  REQUIRE(run_cli({"curve", "--run", run}) == 0);
  CHECK(fs::exists(fs::path(run) / "transition_recon.csv"));
  REQUIRE(run_cli({"plot", "--run", run}) == 0);

  // image rendering path
  const std::string img = dir.file("img.csv");
  REQUIRE(run_cli({"gen", "--class", "altproj-aniso", "--nside", "8", "--k",
                   "6", "--seed", "4", "--out", img}) == 0);
  REQUIRE(run_cli({"plot", "--image", img, "--svg", dir.file("img.svg"),
                   "--pgm", dir.file("img.pgm")}) == 0);
  CHECK(fs::file_size(dir.file("img.svg")) > 0);
  CHECK(fs::file_size(dir.file("img.pgm")) > 0);
}
