#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nsgp/model.hpp"
#include "nsgp/objective.hpp"
#include "nsgp/predict.hpp"

namespace nsgp {

struct NutsConfig {
  double step_size = 0.01;
  int max_tree_depth = 10;
  int n_samples = 800;  // kept per chain
  int n_warmup = 200;   // discarded per chain (20% of the 1000 drawn)
  int n_chains = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PosteriorSample {
  LatentState state;  // natural frame
  double mll = 0.0;
  int chain = 0;
  int index = 0;  // post-warmup draw number within the chain
};

struct ChainStats {
  int chain = 0;
  int transitions = 0;
  int divergent = 0;
  double mean_accept_stat = 0.0;
  double mean_tree_depth = 0.0;
  long long n_leapfrog = 0;
};

struct SampleSet {
  std::vector<PosteriorSample> samples;  // ordered by (chain, index)
  std::vector<ChainStats> chains;

  // Every stride-th draw of each chain, starting with the first.
  SampleSet thinned(int stride) const;
};

// NUTS over the whitened latents of `posterior` (its data weight applies). If
// `start` is given (natural frame), chain 0 starts there; every other chain
// starts at a 0.1 * N(0, I) whitened draw around the prior mean. Throws
// SamplingError if more than half of a chain's transitions diverge.
SampleSet sample_posterior(const LatentPosterior& posterior, const NutsConfig& cfg,
                           const std::optional<LatentState>& start = std::nullopt);
SampleSet sample_posterior(const Vector& y, const Vector& x, const Hyperparams& theta,
                           const VariantFlags& flags, const NutsConfig& cfg,
                           const std::optional<LatentState>& start = std::nullopt);

// Uniform mixture of p(f | latents_i, y) over the training inputs, one
// component per retained draw.
PredictiveMixture posterior_mixture(const SampleSet& samples, const Vector& y, const Vector& x,
                                    int thin = 1);

// Columnar text: header, then one tab-separated row per draw with chain, index,
// mll, and the stored latent entries (ell_*, sigma_*, omega_*).
void write_sample_set(std::ostream& out, const SampleSet& samples);
SampleSet read_sample_set(std::istream& in, Index n, const VariantFlags& flags);

}  // namespace nsgp
