#include "nsgp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

#include "nsgp/errors.hpp"

namespace nsgp {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view v, std::size_t line, std::string_view key) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ParseError("bad value '" + std::string(v) + "' for " + std::string(key), line);
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) throw ParseError("non-finite value for " + std::string(key), line);
  }
  return out;
}

bool parse_bool(std::string_view v, std::size_t line, std::string_view key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError("bad boolean '" + std::string(v) + "' for " + std::string(key), line);
}

using Setter = std::function<void(RunConfig&, std::string_view, std::size_t, std::string_view)>;

template <class T, class Get>
Setter number(Get get) {
  return [get](RunConfig& c, std::string_view v, std::size_t line, std::string_view key) {
    get(c) = parse_number<T>(v, line, key);
  };
}

template <class Get>
Setter boolean(Get get) {
  return [get](RunConfig& c, std::string_view v, std::size_t line, std::string_view key) {
    get(c) = parse_bool(v, line, key);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"mu_ell", number<double>([](RunConfig& c) -> double& { return c.experiment.theta.mu_ell; })},
      {"mu_sigma", number<double>([](RunConfig& c) -> double& { return c.experiment.theta.mu_sigma; })},
      {"mu_omega", number<double>([](RunConfig& c) -> double& { return c.experiment.theta.mu_omega; })},
      {"alpha_ell", number<double>([](RunConfig& c) -> double& { return c.experiment.theta.alpha_ell; })},
      {"alpha_sigma", number<double>([](RunConfig& c) -> double& { return c.experiment.theta.alpha_sigma; })},
      {"alpha_omega", number<double>([](RunConfig& c) -> double& { return c.experiment.theta.alpha_omega; })},
      {"beta_ell", number<double>([](RunConfig& c) -> double& { return c.experiment.theta.beta_ell; })},
      {"beta_sigma", number<double>([](RunConfig& c) -> double& { return c.experiment.theta.beta_sigma; })},
      {"beta_omega", number<double>([](RunConfig& c) -> double& { return c.experiment.theta.beta_omega; })},
      {"mu_in_log_domain", boolean([](RunConfig& c) -> bool& { return c.experiment.theta.mu_in_log_domain; })},
      {"nonstat_omega", boolean([](RunConfig& c) -> bool& { return c.flags.nonstat_omega; })},
      {"nonstat_sigma", boolean([](RunConfig& c) -> bool& { return c.flags.nonstat_sigma; })},
      {"nonstat_ell", boolean([](RunConfig& c) -> bool& { return c.flags.nonstat_ell; })},
      {"seed", number<std::uint64_t>([](RunConfig& c) -> std::uint64_t& { return c.experiment.seed; })},
      {"restarts", number<int>([](RunConfig& c) -> int& { return c.experiment.map.restarts; })},
      {"max_iters", number<int>([](RunConfig& c) -> int& { return c.experiment.map.max_iters; })},
      {"grad_tol", number<double>([](RunConfig& c) -> double& { return c.experiment.map.grad_tol; })},
      {"step_size", number<double>([](RunConfig& c) -> double& { return c.experiment.nuts.step_size; })},
      {"max_tree_depth", number<int>([](RunConfig& c) -> int& { return c.experiment.nuts.max_tree_depth; })},
      {"n_samples", number<int>([](RunConfig& c) -> int& { return c.experiment.nuts.n_samples; })},
      {"n_warmup", number<int>([](RunConfig& c) -> int& { return c.experiment.nuts.n_warmup; })},
      {"n_chains", number<int>([](RunConfig& c) -> int& { return c.experiment.nuts.n_chains; })},
      {"hmc_start_at_map", boolean([](RunConfig& c) -> bool& { return c.experiment.hmc_start_at_map; })},
      {"prediction_samples", number<int>([](RunConfig& c) -> int& { return c.experiment.prediction_samples; })},
      {"thin", number<int>([](RunConfig& c) -> int& { return c.experiment.thin; })},
      {"train_fraction", number<double>([](RunConfig& c) -> double& { return c.train_fraction; })},
  };
  return table;
}

void check(const RunConfig& cfg) {
  try {
    cfg.experiment.theta.validate();
    cfg.experiment.nuts.validate();
  } catch (const std::exception& e) {
    throw ParseError(e.what());
  }
  const ExperimentConfig& e = cfg.experiment;
  if (e.map.restarts < 1) throw ParseError("restarts must be >= 1");
  if (e.map.max_iters < 1) throw ParseError("max_iters must be >= 1");
  if (!(e.map.grad_tol > 0.0)) throw ParseError("grad_tol must be > 0");
  if (e.prediction_samples < 1) throw ParseError("prediction_samples must be >= 1");
  if (e.thin < 1) throw ParseError("thin must be >= 1");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction <= 1.0)) {
    throw ParseError("train_fraction must lie in (0, 1]");
  }
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = raw;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line);
    const std::string_view key = trim(text.substr(0, eq));
    const std::string_view value = trim(text.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ParseError("unknown key '" + std::string(key) + "'", line);
    it->second(cfg, value, line, key);
  }
  check(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_config(in);
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  const ExperimentConfig& e = cfg.experiment;
  const Hyperparams& t = e.theta;
  const auto old_precision = out.precision(17);
  const auto b = [](bool v) { return v ? "true" : "false"; };
  out << "mu_ell = " << t.mu_ell << "\nmu_sigma = " << t.mu_sigma
      << "\nmu_omega = " << t.mu_omega << "\nalpha_ell = " << t.alpha_ell
      << "\nalpha_sigma = " << t.alpha_sigma << "\nalpha_omega = " << t.alpha_omega
      << "\nbeta_ell = " << t.beta_ell << "\nbeta_sigma = " << t.beta_sigma
      << "\nbeta_omega = " << t.beta_omega << "\nmu_in_log_domain = " << b(t.mu_in_log_domain)
      << "\nnonstat_omega = " << b(cfg.flags.nonstat_omega)
      << "\nnonstat_sigma = " << b(cfg.flags.nonstat_sigma)
      << "\nnonstat_ell = " << b(cfg.flags.nonstat_ell) << "\nseed = " << e.seed
      << "\nrestarts = " << e.map.restarts << "\nmax_iters = " << e.map.max_iters
      << "\ngrad_tol = " << e.map.grad_tol << "\nstep_size = " << e.nuts.step_size
      << "\nmax_tree_depth = " << e.nuts.max_tree_depth << "\nn_samples = " << e.nuts.n_samples
      << "\nn_warmup = " << e.nuts.n_warmup << "\nn_chains = " << e.nuts.n_chains
      << "\nhmc_start_at_map = " << b(e.hmc_start_at_map)
      << "\nprediction_samples = " << e.prediction_samples << "\nthin = " << e.thin
      << "\ntrain_fraction = " << cfg.train_fraction << '\n';
  out.precision(old_precision);
}

}  // namespace nsgp
