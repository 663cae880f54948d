#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nsgp/dataset.hpp"
#include "nsgp/infer_hmc.hpp"
#include "nsgp/infer_map.hpp"
#include "nsgp/model.hpp"

namespace nsgp {

enum class Inference { map, hmc };

std::string_view name_of(Inference inference);
Inference inference_from_name(std::string_view name);

struct ExperimentConfig {
  Hyperparams theta;
  MapOptions map;
  NutsConfig nuts;
  int prediction_samples = 1;  // s
  int thin = 10;               // mixture stride over posterior draws
  std::uint64_t seed = 0;
  bool hmc_start_at_map = false;
};

struct EvalRow {
  std::string dataset;
  std::string variant;
  Inference inference = Inference::map;
  double mll = 0.0;  // MAP value, or mean over posterior draws
  double mse = 0.0;
  double nlpd = 0.0;
  double runtime_s = 0.0;
  std::uint64_t seed = 0;
  std::string error;  // nonempty if the cell failed
};

struct EvalReport {
  std::vector<EvalRow> rows;  // ordered by (dataset, variant)
};

// Everything needed to predict from one fit.
struct FitOutcome {
  Inference inference = Inference::map;
  std::optional<MapResult> map;
  std::optional<SampleSet> samples;
};

FitOutcome fit_model(const Dataset& data, const VariantFlags& flags, Inference inference,
                     const ExperimentConfig& cfg);
PredictiveMixture predict_outcome(const FitOutcome& fit, const Dataset& data,
                                  const Vector& x_star, const ExperimentConfig& cfg);

// Fit on the training split, score on the test split, for every
// (dataset, variant) pair. Cell failures are recorded and the run continues.
EvalReport run_experiment(const std::vector<Dataset>& datasets,
                          const std::vector<VariantFlags>& variants, Inference inference,
                          const ExperimentConfig& cfg);

// Tab-separated, header first. Runtimes are only written when asked for, so the
// default output depends on nothing but data, config and seed.
void write_report(std::ostream& out, const EvalReport& report, bool with_runtime = false);

struct LatentRmse {
  double ell = 0.0;
  double sigma = 0.0;
  double omega = 0.0;
};

// RMSE between fitted and generating log-latents at the given data indices
// (normalized units). Throws std::invalid_argument if the truth is missing.
LatentRmse latent_reconstruction_error(const LatentState& fitted, const Dataset& data,
                                       const std::vector<Index>& at);

struct ReconstructionPoint {
  Index size = 0;
  LatentRmse rmse;
  double mll = 0.0;
};

// MAP fits on nested random subsets of the given sizes.
std::vector<ReconstructionPoint> reconstruction_curve(const Dataset& data,
                                                      const std::vector<Index>& sizes,
                                                      const VariantFlags& flags,
                                                      const ExperimentConfig& cfg);

void write_reconstruction(std::ostream& out, const std::vector<ReconstructionPoint>& curve);

}  // namespace nsgp
