#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "nsgp/experiment.hpp"
#include "nsgp/model.hpp"

namespace nsgp {

// Plain-text "key = value" configuration. '#' starts a comment. Keys:
//
//   mu_ell mu_sigma mu_omega alpha_ell alpha_sigma alpha_omega
//   beta_ell beta_sigma beta_omega mu_in_log_domain
//   nonstat_omega nonstat_sigma nonstat_ell seed
//   restarts max_iters grad_tol
//   step_size max_tree_depth n_samples n_warmup n_chains hmc_start_at_map
//   prediction_samples thin train_fraction
//
// train_fraction = 1 fits on every point (no held-out set). Unknown keys and
// malformed values raise ParseError with the line number.
struct RunConfig {
  ExperimentConfig experiment;
  VariantFlags flags;
  double train_fraction = 0.5;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const RunConfig& cfg);

}  // namespace nsgp
