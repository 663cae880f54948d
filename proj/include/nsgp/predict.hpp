#pragma once

#include <cstdint>
#include <vector>

#include "nsgp/model.hpp"
#include "nsgp/types.hpp"

namespace nsgp {

struct SampleSet;

struct LatentConditional {
  Vector mean;
  Matrix cov;
};

// GP conditional of one log-latent at x_star given its values at x, under the
// component's SE prior. The prior's diagonal jitter is treated as a nugget on
// coincident inputs, so conditioning on x_star == x returns the latent itself.
LatentConditional latent_conditional(const Vector& latent, const Vector& x, const Vector& x_star,
                                     const Hyperparams& theta, Component c);

// One Gaussian over the targets together with the target latents it was built
// from. noise_var is exp(2 * omega_star) and is not part of cov.
struct GaussianComponent {
  Vector mean;
  Matrix cov;
  Vector noise_var;
  Vector log_ell;
  Vector log_sigma;
  Vector log_omega;
};

struct PredictiveMixture {
  std::vector<GaussianComponent> components;

  double weight() const { return 1.0 / static_cast<double>(components.size()); }
};

// Mixture of s Gaussians from drawing target lengthscale and signal latents
// from their conditionals (s == 1 uses the conditional means). The noise
// latent always uses its conditional mean.
PredictiveMixture predict_map(const LatentState& state, const Vector& y, const Vector& x,
                              const Vector& x_star, const Hyperparams& theta, int s = 1,
                              std::uint64_t seed = 0);

// m * s components, s per retained posterior draw.
PredictiveMixture predict_hmc(const SampleSet& samples, const Vector& y, const Vector& x,
                              const Vector& x_star, const Hyperparams& theta, int s = 1,
                              std::uint64_t seed = 0, int thin = 1);

struct MixtureMoments {
  Vector mean;
  Vector var;  // pointwise, latent f only
};

MixtureMoments mixture_moments(const PredictiveMixture& mix);

}  // namespace nsgp
