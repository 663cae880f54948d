#pragma once

#include "nsgp/model.hpp"
#include "nsgp/types.hpp"

namespace nsgp {

// Marginal log likelihood split into its data and latent-prior parts.
struct MLLValue {
  double total = 0.0;
  double data_term = 0.0;
  double prior_ell = 0.0;
  double prior_sigma = 0.0;
  double prior_omega = 0.0;

  double prior(Component c) const;
};

// Gradient in the frame the state was given in. Length n for nonstationary
// components and 1 for stationary scalars.
struct LatentGradient {
  Vector ell;
  Vector sigma;
  Vector omega;

  Vector& operator[](Component c);
  const Vector& operator[](Component c) const;
  Vector pack() const;
};

struct Evaluation {
  MLLValue value;
  LatentGradient gradient;
};

// log N(y | 0, K_f + Omega) + sum_c log p(v_c) for one dataset and prior.
//
// The prior factors are built once on construction. All methods are const and
// safe to call concurrently. data_weight scales the data term (and its
// gradient); 0 leaves the latent prior alone, which the sampler tests use.
class LatentPosterior {
 public:
  LatentPosterior(Vector x, Vector y, Hyperparams theta, VariantFlags flags,
                  double data_weight = 1.0);

  MLLValue value(const LatentState& natural) const;
  Evaluation evaluate(const LatentState& natural) const;
  // Value and gradient with respect to whitened coordinates.
  Evaluation evaluate_whitened(const LatentState& whitened) const;

  // Prior mean: v = mu for every component.
  LatentState prior_mean(Frame frame = Frame::natural) const;

  const Vector& x() const { return x_; }
  const Vector& y() const { return y_; }
  const Hyperparams& hyperparams() const { return theta_; }
  const VariantFlags& flags() const { return flags_; }
  const PriorFactors& factors() const { return factors_; }
  Index n() const { return x_.size(); }
  double data_weight() const { return data_weight_; }

 private:
  Evaluation evaluate_impl(const LatentState& natural, const LatentState* whitened,
                           bool with_gradient) const;
  void check_shape(const LatentState& state, Frame frame) const;

  Vector x_;
  Vector y_;
  Hyperparams theta_;
  VariantFlags flags_;
  double data_weight_;
  PriorFactors factors_;
};

MLLValue mll(const Vector& y, const Vector& x, const LatentState& state, const Hyperparams& theta,
             const VariantFlags& flags);

LatentGradient mll_gradient(const Vector& y, const Vector& x, const LatentState& state,
                            const Hyperparams& theta, const VariantFlags& flags);

}  // namespace nsgp
