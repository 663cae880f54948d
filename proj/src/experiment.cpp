#include "nsgp/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "nsgp/errors.hpp"
#include "nsgp/metrics.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace nsgp {
namespace {

Vector take(const Vector& v, const std::vector<Index>& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = v[idx[i]];
  return out;
}

MapOptions map_options(const ExperimentConfig& cfg) {
  MapOptions opts = cfg.map;
  opts.seed = cfg.seed;
  return opts;
}

double rmse(const Vector& a, const Vector& b) {
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

}  // namespace

std::string_view name_of(Inference inference) {
  return inference == Inference::map ? "map" : "hmc";
}

Inference inference_from_name(std::string_view name) {
  if (name == "map") return Inference::map;
  if (name == "hmc") return Inference::hmc;
  throw std::invalid_argument("unknown inference method '" + std::string(name) + "'");
}

FitOutcome fit_model(const Dataset& data, const VariantFlags& flags, Inference inference,
                     const ExperimentConfig& cfg) {
  const LatentPosterior posterior(data.train_x(), data.train_y(), cfg.theta, flags);
  FitOutcome out;
  out.inference = inference;
  if (inference == Inference::map || cfg.hmc_start_at_map) {
    out.map = fit_map(posterior, map_options(cfg));
  }
  if (inference == Inference::hmc) {
    NutsConfig nuts = cfg.nuts;
    nuts.seed = cfg.seed;
    std::optional<LatentState> start;
    if (out.map) start = out.map->state;
    out.samples = sample_posterior(posterior, nuts, start);
  }
  return out;
}

PredictiveMixture predict_outcome(const FitOutcome& fit, const Dataset& data,
                                  const Vector& x_star, const ExperimentConfig& cfg) {
  const Vector x = data.train_x();
  const Vector y = data.train_y();
  if (fit.inference == Inference::hmc) {
    if (!fit.samples) throw std::invalid_argument("predict_outcome: no posterior samples");
    return predict_hmc(*fit.samples, y, x, x_star, cfg.theta, cfg.prediction_samples, cfg.seed,
                       cfg.thin);
  }
  if (!fit.map) throw std::invalid_argument("predict_outcome: no MAP state");
  return predict_map(fit.map->state, y, x, x_star, cfg.theta, cfg.prediction_samples, cfg.seed);
}

EvalReport run_experiment(const std::vector<Dataset>& datasets,
                          const std::vector<VariantFlags>& variants, Inference inference,
                          const ExperimentConfig& cfg) {
  EvalReport report;
  report.rows.resize(datasets.size() * variants.size());
  detail::parallel_for(static_cast<int>(report.rows.size()), [&](int cell) {
    const Dataset& data = datasets[static_cast<std::size_t>(cell) / variants.size()];
    const VariantFlags& flags = variants[static_cast<std::size_t>(cell) % variants.size()];
    EvalRow& row = report.rows[static_cast<std::size_t>(cell)];
    row.dataset = data.name;
    row.variant = flags.name();
    row.inference = inference;
    row.seed = cfg.seed;
    const auto start = std::chrono::steady_clock::now();
    try {
      if (data.test.empty()) throw std::invalid_argument("dataset has an empty test split");
      const FitOutcome fit = fit_model(data, flags, inference, cfg);
      if (fit.samples) {
        double total = 0.0;
        for (const PosteriorSample& s : fit.samples->samples) total += s.mll;
        row.mll = total / static_cast<double>(fit.samples->samples.size());
      } else {
        row.mll = fit.map->mll.total;
      }
      const PredictiveMixture mix = predict_outcome(fit, data, data.test_x(), cfg);
      row.mse = mse(data.test_y(), mixture_moments(mix).mean);
      row.nlpd = nlpd(data.test_y(), mix);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    row.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });
  return report;
}

void write_report(std::ostream& out, const EvalReport& report, bool with_runtime) {
  out << "dataset\tvariant\tinference\tseed\tmll\tmse\tnlpd";
  if (with_runtime) out << "\truntime_s";
  out << "\terror\n";
  const auto old_precision = out.precision(10);
  for (const EvalRow& r : report.rows) {
    out << r.dataset << '\t' << r.variant << '\t' << name_of(r.inference) << '\t' << r.seed;
    if (r.error.empty()) {
      out << '\t' << r.mll << '\t' << r.mse << '\t' << r.nlpd;
    } else {
      out << "\tnan\tnan\tnan";
    }
    if (with_runtime) out << '\t' << r.runtime_s;
    out << '\t' << r.error << '\n';
  }
  out.precision(old_precision);
}

LatentRmse latent_reconstruction_error(const LatentState& fitted, const Dataset& data,
                                       const std::vector<Index>& at) {
  if (fitted.n != static_cast<Index>(at.size())) {
    throw DimensionError("latent_reconstruction_error: state size differs from index count");
  }
  if (fitted.frame != Frame::natural) {
    throw FrameError("latent_reconstruction_error: expected a natural-frame state");
  }
  std::array<double, 3> out{};
  for (Component c : kComponents) {
    const std::optional<Vector> truth = data.log_truth(c, at);
    if (!truth) {
      throw std::invalid_argument("latent_reconstruction_error: dataset has no truth for " +
                                  std::string(name_of(c)));
    }
    out[index_of(c)] = rmse(fitted.expanded(c), *truth);
  }
  return {out[0], out[1], out[2]};
}

std::vector<ReconstructionPoint> reconstruction_curve(const Dataset& data,
                                                      const std::vector<Index>& sizes,
                                                      const VariantFlags& flags,
                                                      const ExperimentConfig& cfg) {
  if (!data.truth) throw std::invalid_argument("reconstruction_curve: dataset has no truth");
  std::vector<Index> order(static_cast<std::size_t>(data.size()));
  for (Index i = 0; i < data.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  auto rng = detail::make_rng(cfg.seed, 0, detail::kSubsample);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<ReconstructionPoint> curve;
  for (Index size : sizes) {
    if (size < 2 || size > data.size()) {
      throw std::invalid_argument("reconstruction_curve: size " + std::to_string(size) +
                                  " outside [2, " + std::to_string(data.size()) + "]");
    }
    std::vector<Index> at(order.begin(), order.begin() + size);
    std::sort(at.begin(), at.end());
    const MapResult fit =
        fit_map(take(data.y_norm, at), take(data.x_norm, at), cfg.theta, flags, map_options(cfg));
    curve.push_back({size, latent_reconstruction_error(fit.state, data, at), fit.mll.total});
  }
  return curve;
}

void write_reconstruction(std::ostream& out, const std::vector<ReconstructionPoint>& curve) {
  out << "size\tmll\trmse_ell\trmse_sigma\trmse_omega\n";
  const auto old_precision = out.precision(10);
  for (const ReconstructionPoint& p : curve) {
    out << p.size << '\t' << p.mll << '\t' << p.rmse.ell << '\t' << p.rmse.sigma << '\t'
        << p.rmse.omega << '\n';
  }
  out.precision(old_precision);
}

}  // namespace nsgp
