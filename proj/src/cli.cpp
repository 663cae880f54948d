#include "nsgp/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nsgp/config.hpp"
#include "nsgp/dataset.hpp"
#include "nsgp/errors.hpp"
#include "nsgp/experiment.hpp"
#include "nsgp/model_io.hpp"
#include "nsgp/predict.hpp"

namespace nsgp::cli {
namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

RunConfig config_or_default(const std::string& path) {
  return path.empty() ? RunConfig{} : load_config(path);
}

Dataset held_out(Dataset data, const RunConfig& cfg) {
  if (cfg.train_fraction >= 1.0) return data;
  return split(std::move(data), cfg.train_fraction, cfg.experiment.seed);
}

// Target inputs: a CSV whose first column is x (a y column, if any, is ignored).
Vector read_targets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError("targets file is empty");
  if (line.substr(0, line.find(',')).find('x') == std::string::npos) {
    throw ParseError("expected a header starting with 'x'", line_no);
  }
  std::vector<double> xs;
  while (std::getline(in, line)) {
    ++line_no;
    std::string field = line.substr(0, line.find(','));
    field.erase(std::remove_if(field.begin(), field.end(), ::isspace), field.end());
    if (field.empty() && line.find(',') == std::string::npos) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() ||
        !std::isfinite(v)) {
      throw ParseError("not a finite number: '" + field + "'", line_no);
    }
    xs.push_back(v);
  }
  if (xs.empty()) throw ParseError("targets file has no rows", line_no);
  return Eigen::Map<const Vector>(xs.data(), static_cast<Index>(xs.size()));
}

std::vector<Dataset> suite(const std::string& name, std::uint64_t seed, const RunConfig& cfg) {
  std::vector<std::string> names;
  if (name == "table2") {
    names = dataset_names();
  } else if (name == "quick") {
    names = {"D_ell", "J_like"};
  } else {
    throw std::invalid_argument("unknown suite '" + name + "' (table2, quick)");
  }
  std::vector<Dataset> out;
  for (const std::string& n : names) {
    out.push_back(split(generate_dataset(n, 0, seed), cfg.train_fraction, seed));
  }
  return out;
}

std::vector<VariantFlags> suite_variants(const std::string& name) {
  if (name == "quick") {
    return {VariantFlags{}, VariantFlags{false, true, false}, VariantFlags{false, false, true}};
  }
  return VariantFlags::table_variants();
}

void cmd_generate(const std::string& name, std::uint64_t seed, Index size,
                  const std::string& out_path) {
  const Dataset data = generate_dataset(name, size, seed);
  auto out = open_out(out_path);
  write_csv(out, data);
}

void cmd_fit(const std::string& method, const std::string& config_path,
             const std::string& data_path, const std::string& out_path,
             const std::string& samples_path, bool mu_in_log_domain) {
  RunConfig cfg = config_or_default(config_path);
  if (mu_in_log_domain) cfg.experiment.theta.mu_in_log_domain = true;
  const Inference inference = inference_from_name(method);
  const Dataset data = held_out(load_csv(data_path), cfg);

  FittedModel model;
  model.config = cfg;
  model.inference = inference;
  model.norm = data.norm;
  model.train_x = data.train_x();
  model.train_y = data.train_y();
  model.outcome = fit_model(data, cfg.flags, inference, cfg.experiment);
  auto out = open_out(out_path);
  save_model(out, model);
  if (!samples_path.empty() && model.outcome.samples) {
    auto samples = open_out(samples_path);
    write_sample_set(samples, *model.outcome.samples);
  }
}

void cmd_predict(const std::string& model_path, const std::string& targets_path,
                 const std::string& out_path) {
  const FittedModel model = load_model(model_path);
  const Vector x_raw = read_targets(targets_path);
  const Vector x_star = model.norm.normalize_x(x_raw);

  Dataset train = make_dataset("model", model.train_x, model.train_y);
  train.x_norm = model.train_x;
  train.y_norm = model.train_y;
  train.norm = model.norm;
  const PredictiveMixture mix = predict_outcome(model.outcome, train, x_star, model.config.experiment);
  const MixtureMoments moments = mixture_moments(mix);

  const Index m = x_star.size();
  Vector ell = Vector::Zero(m);
  Vector sigma = Vector::Zero(m);
  Vector omega = Vector::Zero(m);
  for (const GaussianComponent& c : mix.components) {
    ell += c.log_ell.array().exp().matrix();
    sigma += c.log_sigma.array().exp().matrix();
    omega += c.log_omega.array().exp().matrix();
  }
  const double w = mix.weight();
  const NormParams& norm = model.norm;

  auto out = open_out(out_path);
  out.precision(17);
  out << "x,mean,var,lower95,upper95,ell,sigma,omega\n";
  for (Index i = 0; i < m; ++i) {
    const double mean = moments.mean[i] * norm.y_scale + norm.y_offset;
    const double var = moments.var[i] * norm.y_scale * norm.y_scale;
    const double half = 1.959963984540054 * std::sqrt(std::max(var, 0.0));
    out << x_raw[i] << ',' << mean << ',' << var << ',' << mean - half << ',' << mean + half << ','
        << w * ell[i] * norm.x_scale << ',' << w * sigma[i] * norm.y_scale << ','
        << w * omega[i] * norm.y_scale << '\n';
  }
}

void cmd_evaluate(const std::string& suite_name, const std::string& method,
                  const std::string& config_path, std::uint64_t seed, bool seed_given,
                  bool with_runtime, const std::string& out_path) {
  RunConfig cfg = config_or_default(config_path);
  if (seed_given) cfg.experiment.seed = seed;
  if (cfg.train_fraction >= 1.0) throw std::invalid_argument("evaluate needs a held-out split");
  const EvalReport report = run_experiment(suite(suite_name, cfg.experiment.seed, cfg),
                                           suite_variants(suite_name), inference_from_name(method),
                                           cfg.experiment);
  auto out = open_out(out_path);
  write_report(out, report, with_runtime);
}

void cmd_reconstruct(const std::string& data_path, const std::string& config_path,
                     std::vector<Index> sizes, const std::string& out_path) {
  RunConfig cfg;
  if (config_path.empty()) {
    cfg.flags = {true, true, true};
  } else {
    cfg = load_config(config_path);
  }
  const Dataset data = load_csv(data_path);
  if (!data.truth) throw std::invalid_argument(data_path + " has no truth columns");
  if (sizes.empty()) {
    for (int q = 1; q <= 4; ++q) sizes.push_back(std::max<Index>(2, data.size() * q / 4));
  }
  const auto curve = reconstruction_curve(data, sizes, cfg.flags, cfg.experiment);
  auto out = open_out(out_path);
  write_reconstruction(out, curve);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Nonstationary Gaussian process regression"};
  app.require_subcommand(1);

  std::string name, out, method = "map", config, data, samples, model, targets;
  std::string suite_name = "quick";
  std::uint64_t seed = 0;
  Index size = 0;
  bool mu_log = false;
  bool with_runtime = false;
  std::vector<Index> sizes;

  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset as CSV");
  gen->add_option("--name", name, "Dataset family")->required();
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("--size", size, "Number of points (default: family size)");
  gen->add_option("--out", out, "Output CSV")->required();

  auto* fit = app.add_subcommand("fit", "Fit latent functions to a CSV dataset");
  fit->add_option("--method", method, "map or hmc")->check(CLI::IsMember({"map", "hmc"}));
  fit->add_option("--config", config, "Key-value configuration file");
  fit->add_option("--data", data, "Input CSV with header x,y")->required();
  fit->add_option("--out", out, "Output model (JSON)")->required();
  fit->add_option("--samples", samples, "Also write posterior draws (TSV, hmc only)");
  fit->add_flag("--mu-in-log-domain", mu_log, "Read prior means as log-domain values");

  auto* pred = app.add_subcommand("predict", "Predict at target inputs from a fitted model");
  pred->add_option("--model", model, "Model written by fit")->required();
  pred->add_option("--targets", targets, "CSV whose first column is x")->required();
  pred->add_option("--out", out, "Output CSV")->required();

  auto* eval = app.add_subcommand("evaluate", "Benchmark model variants on synthetic data");
  eval->add_option("--suite", suite_name, "table2 or quick")->check(CLI::IsMember({"table2", "quick"}));
  eval->add_option("--inference", method, "map or hmc")->check(CLI::IsMember({"map", "hmc"}));
  eval->add_option("--config", config, "Key-value configuration file");
  auto* seed_opt = eval->add_option("--seed", seed, "Random seed (overrides config)");
  eval->add_flag("--runtime", with_runtime, "Include wall-clock runtimes");
  eval->add_option("--out", out, "Output report (TSV)")->required();

  auto* rec = app.add_subcommand("reconstruct", "Latent recovery error against training size");
  rec->add_option("--data", data, "CSV with truth columns ell,sigma,omega")->required();
  rec->add_option("--config", config, "Key-value configuration file");
  rec->add_option("--sizes", sizes, "Subsample sizes");
  rec->add_option("--out", out, "Output TSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (gen->parsed()) cmd_generate(name, seed, size, out);
    if (fit->parsed()) cmd_fit(method, config, data, out, samples, mu_log);
    if (pred->parsed()) cmd_predict(model, targets, out);
    if (eval->parsed()) {
      cmd_evaluate(suite_name, method, config, seed, seed_opt->count() > 0, with_runtime, out);
    }
    if (rec->parsed()) cmd_reconstruct(data, config, sizes, out);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace nsgp::cli
