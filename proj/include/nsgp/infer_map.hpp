#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsgp/model.hpp"
#include "nsgp/objective.hpp"

namespace nsgp {

struct MapOptions {
  int restarts = 10;
  int max_iters = 2000;
  double grad_tol = 1e-5;  // on the max-norm of the whitened gradient
  std::uint64_t seed = 0;
  bool record_trace = false;
};

struct RestartReport {
  int restart = 0;
  double initial_mll = 0.0;
  double final_mll = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string error;           // nonempty if the restart failed
  std::vector<double> trace;   // accepted MLL values, if requested
};

struct MapResult {
  LatentState state;  // natural frame
  MLLValue mll;
  int restarts_run = 0;
  bool converged = false;
  int iterations = 0;
  std::vector<RestartReport> restarts;
};

// Multi-restart gradient ascent in whitened coordinates with Armijo
// backtracking. Restart 0 starts at the prior mean, the others at
// 0.1 * N(0, I) whitened perturbations of it.
MapResult fit_map(const LatentPosterior& posterior, const MapOptions& opts = {});
MapResult fit_map(const Vector& y, const Vector& x, const Hyperparams& theta,
                  const VariantFlags& flags, const MapOptions& opts = {});

struct FunctionPosterior {
  Vector mean;
  Matrix cov;
};

// p(f | latents, y) at the training inputs.
FunctionPosterior map_function_posterior(const LatentState& state, const Vector& y,
                                         const Vector& x);
inline FunctionPosterior map_function_posterior(const MapResult& map, const Vector& y,
                                                const Vector& x) {
  return map_function_posterior(map.state, y, x);
}

}  // namespace nsgp
