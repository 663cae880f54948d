#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nsgp/cli.hpp"
#include "nsgp/dataset.hpp"

namespace fs = std::filesystem;
using nsgp::cli::run;

namespace {

struct Workdir {
  fs::path root;

  explicit Workdir(const std::string& tag) {
    root = fs::temp_directory_path() / ("nsgp_cli_" + tag);
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workdir() { fs::remove_all(root); }

  std::string operator()(const std::string& name) const { return (root / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

const char* kFastConfig =
    "restarts = 1\nmax_iters = 40\nn_chains = 2\nn_warmup = 5\nn_samples = 10\n"
    "max_tree_depth = 4\nstep_size = 0.05\nthin = 2\nseed = 3\n";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("argument errors") {
  CHECK(run({}) == nsgp::cli::kExitParse);
  CHECK(run({"frobnicate"}) == nsgp::cli::kExitParse);
  CHECK(run({"generate", "--name", "D_ell"}) == nsgp::cli::kExitParse);
  CHECK(run({"fit", "--method", "mcmc", "--data", "a", "--out", "b"}) == nsgp::cli::kExitParse);
  CHECK(run({"--help"}) == nsgp::cli::kExitOk);
}

TEST_CASE("generate writes a loadable dataset") {
  Workdir w("generate");
  REQUIRE(run({"generate", "--name", "D_sigma", "--seed", "4", "--size", "25", "--out", w("d.csv")}) == 0);
  const nsgp::Dataset d = nsgp::load_csv(w("d.csv"));
  CHECK(d.size() == 25);
  CHECK(d.truth);
  CHECK(run({"generate", "--name", "D_nothing", "--out", w("e.csv")}) == nsgp::cli::kExitFailure);
}

TEST_CASE("fit and predict") {
  Workdir w("fit");
  spit(w("cfg.txt"), std::string(kFastConfig) + "nonstat_ell = true\n");
  REQUIRE(run({"generate", "--name", "D_ell", "--seed", "2", "--size", "30", "--out", w("d.csv")}) == 0);
  REQUIRE(run({"fit", "--method", "map", "--config", w("cfg.txt"), "--data", w("d.csv"), "--out",
               w("m.json")}) == 0);
  spit(w("t.csv"), "x,y\n0.1,0\n0.5,0\n0.75,1\n");
  REQUIRE(run({"predict", "--model", w("m.json"), "--targets", w("t.csv"), "--out", w("p.csv")}) == 0);
  const auto rows = lines(slurp(w("p.csv")));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "x,mean,var,lower95,upper95,ell,sigma,omega");
  CHECK(rows[1].rfind("0.10000000000000001,", 0) == 0);

  REQUIRE(run({"fit", "--method", "hmc", "--config", w("cfg.txt"), "--data", w("d.csv"), "--out",
               w("h.json"), "--samples", w("s.tsv")}) == 0);
  CHECK(lines(slurp(w("s.tsv"))).size() == 21);
  REQUIRE(run({"predict", "--model", w("h.json"), "--targets", w("t.csv"), "--out", w("q.csv")}) == 0);
  CHECK(lines(slurp(w("q.csv"))).size() == 4);
}

TEST_CASE("exit codes for bad inputs") {
  Workdir w("codes");
  spit(w("cfg.txt"), kFastConfig);
  spit(w("bad.csv"), "x,y\n0,1\n1,oops\n");
  CHECK(run({"fit", "--data", w("bad.csv"), "--out", w("m.json")}) == nsgp::cli::kExitParse);
  spit(w("badcfg.txt"), "restarts = many\n");
  REQUIRE(run({"generate", "--name", "D_sigma", "--size", "20", "--out", w("d.csv")}) == 0);
  CHECK(run({"fit", "--config", w("badcfg.txt"), "--data", w("d.csv"), "--out", w("m.json")}) ==
        nsgp::cli::kExitParse);
  CHECK(run({"fit", "--data", w("missing.csv"), "--out", w("m.json")}) == nsgp::cli::kExitFailure);
  spit(w("junk.json"), "{\"format\": 1}");
  spit(w("t.csv"), "x\n0.5\n");
  CHECK(run({"predict", "--model", w("junk.json"), "--targets", w("t.csv"), "--out", w("p.csv")}) ==
        nsgp::cli::kExitParse);
  spit(w("huge.txt"), std::string(kFastConfig) + "mu_sigma = 1e200\n");
  CHECK(run({"fit", "--config", w("huge.txt"), "--data", w("d.csv"), "--out", w("m.json")}) ==
        nsgp::cli::kExitNumerical);
}

TEST_CASE("evaluate and reconstruct") {
  Workdir w("eval");
  spit(w("cfg.txt"), kFastConfig);
  REQUIRE(run({"evaluate", "--suite", "quick", "--config", w("cfg.txt"), "--out", w("r.tsv")}) == 0);
  const auto rows = lines(slurp(w("r.tsv")));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == "dataset\tvariant\tinference\tseed\tmll\tmse\tnlpd\terror");
  CHECK(rows[1].rfind("D_ell\tGP\tmap\t3\t", 0) == 0);

  REQUIRE(run({"generate", "--name", "D_omega_sigma_ell", "--size", "24", "--out", w("d.csv")}) == 0);
  REQUIRE(run({"reconstruct", "--data", w("d.csv"), "--config", w("cfg.txt"), "--sizes", "12", "24",
               "--out", w("c.tsv")}) == 0);
  const auto curve = lines(slurp(w("c.tsv")));
  REQUIRE(curve.size() == 3);
  CHECK(curve[0] == "size\tmll\trmse_ell\trmse_sigma\trmse_omega");
  CHECK(curve[1].rfind("12\t", 0) == 0);

  REQUIRE(run({"generate", "--name", "J_like", "--out", w("j.csv")}) == 0);
  CHECK(run({"reconstruct", "--data", w("j.csv"), "--out", w("x.tsv")}) == nsgp::cli::kExitFailure);
}

}  // TEST_SUITE
