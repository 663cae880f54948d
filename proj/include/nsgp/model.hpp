#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "nsgp/linalg.hpp"
#include "nsgp/types.hpp"

namespace nsgp {

// The nine fixed prior parameters. Means are given on the original scale
// (median of l, s, w) and the log-latent priors are centred on their logs,
// unless mu_in_log_domain is set, in which case the means are used as-is.
struct Hyperparams {
  double mu_ell = 0.2;
  double mu_sigma = 0.5;
  double mu_omega = 0.1;
  double alpha_ell = 1.0;
  double alpha_sigma = 1.0;
  double alpha_omega = 1.0;
  double beta_ell = 0.1;
  double beta_sigma = 0.1;
  double beta_omega = 0.2;
  bool mu_in_log_domain = false;

  double mean(Component c) const;
  double log_mean(Component c) const;
  double alpha(Component c) const;
  double beta(Component c) const;

  void validate() const;
};

// Which latents are input dependent. The rest are scalar constants.
struct VariantFlags {
  bool nonstat_omega = false;
  bool nonstat_sigma = false;
  bool nonstat_ell = false;

  bool nonstationary(Component c) const;

  // "GP", "omega-GP", "omega,sigma,ell-GP" and so on.
  std::string name() const;
  static VariantFlags from_name(std::string_view name);

  static std::array<VariantFlags, 8> all_combinations();
  // The seven models compared in the benchmark table (everything but sigma,ell).
  static std::vector<VariantFlags> table_variants();

  bool operator==(const VariantFlags&) const = default;
};

enum class Frame { natural, whitened };

// Log-latent values at the n training inputs. Stationary components hold a
// single scalar that stands for the constant vector c * 1.
struct LatentState {
  Index n = 0;
  VariantFlags flags;
  Frame frame = Frame::natural;
  Vector ell;
  Vector sigma;
  Vector omega;

  static LatentState zeros(Index n, VariantFlags flags, Frame frame = Frame::natural);

  Vector& operator[](Component c);
  const Vector& operator[](Component c) const;

  // Stored length of a component: n if nonstationary, else 1.
  Index size(Component c) const;
  // Length-n vector, replicating stationary scalars.
  Vector expanded(Component c) const;

  Index packed_size() const;
  Vector pack() const;
  // Inverse of pack(), reusing this state's shape and frame.
  LatentState unpack(const Vector& packed) const;

  // Shapes consistent with n and flags; exp of every entry finite and positive.
  void validate() const;
};

struct PriorFactor {
  Matrix lower;        // Cholesky factor of the jittered SE prior covariance
  double jitter = 0.0; // absolute diagonal jitter baked into `lower`
  double log_mean = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
};

struct PriorFactors {
  std::array<PriorFactor, 3> factor;

  const PriorFactor& operator[](Component c) const { return factor[index_of(c)]; }
};

PriorFactors build_prior_factors(const Vector& x, const Hyperparams& theta);

// Whitened coordinates of a nonstationary component solve L w = v - mu.
// Stationary scalars pass through unchanged.
LatentState whiten(const LatentState& state, const PriorFactors& factors);
LatentState unwhiten(const LatentState& state, const PriorFactors& factors);

// Chain rule through v = mu + L w: returns L^T g.
Vector whitened_gradient(const Vector& g_natural, const PriorFactors& factors, Component c);

}  // namespace nsgp
