#pragma once

#include <functional>
#include <random>

#include "nsgp/types.hpp"

// Fixed step-size No-U-Turn sampler with slice sampling (the "efficient"
// variant without step-size adaptation), identity mass matrix.
namespace nsgp::nuts {

// Returns log p(theta) and writes its gradient. A non-finite return marks the
// point as outside the support.
using LogDensity = std::function<double(const Vector& theta, Vector& grad)>;

using Rng = std::mt19937_64;

struct PhasePoint {
  Vector theta;
  Vector rho;
  Vector grad;
  double logp = 0.0;

  double hamiltonian() const { return logp - 0.5 * rho.squaredNorm(); }
};

PhasePoint make_point(const LogDensity& target, Vector theta, Vector rho);

// One leapfrog step of size eps (negative eps integrates backwards).
void leapfrog(const LogDensity& target, PhasePoint& z, double eps);

// Energy drop below which a trajectory is abandoned as divergent.
inline constexpr double kMaxEnergyError = 1000.0;

struct TransitionInfo {
  int tree_depth = 0;
  int n_leapfrog = 0;
  bool divergent = false;
  double accept_stat = 0.0;  // mean min(1, exp(H' - H0)) over the visited leaves
};

// Position, log density and gradient carried between transitions.
struct ChainState {
  Vector theta;
  Vector grad;
  double logp = 0.0;
};

ChainState initial_state(const LogDensity& target, Vector theta);

ChainState transition(const LogDensity& target, const ChainState& current, double eps,
                      int max_tree_depth, Rng& rng, TransitionInfo& info);

}  // namespace nsgp::nuts
