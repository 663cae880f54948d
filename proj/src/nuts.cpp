#include "nsgp/nuts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsgp::nuts {
namespace {

struct Subtree {
  PhasePoint minus;
  PhasePoint plus;
  ChainState proposal;
  double n_valid = 0.0;  // leaves inside the slice
  bool ok = true;        // no U-turn and no divergence
  bool divergent = false;
  double sum_accept = 0.0;
  int n_leaves = 0;
};

double evaluate(const LogDensity& target, const Vector& theta, Vector& grad) {
  grad.resize(theta.size());
  const double logp = target(theta, grad);
  if (!std::isfinite(logp) || !grad.allFinite()) {
    grad.setZero();
    return -std::numeric_limits<double>::infinity();
  }
  return logp;
}

bool no_uturn(const PhasePoint& minus, const PhasePoint& plus) {
  const Vector span = plus.theta - minus.theta;
  return span.dot(minus.rho) >= 0.0 && span.dot(plus.rho) >= 0.0;
}

Subtree build_tree(const LogDensity& target, const PhasePoint& edge, double log_slice, int direction,
                   int depth, double eps, double h0, Rng& rng, int& n_leapfrog) {
  if (depth == 0) {
    PhasePoint z = edge;
    leapfrog(target, z, direction * eps);
    ++n_leapfrog;
    const double h = std::isfinite(z.logp) ? z.hamiltonian()
                                            : -std::numeric_limits<double>::infinity();
    Subtree t;
    t.proposal = ChainState{z.theta, z.grad, z.logp};
    t.n_valid = log_slice <= h ? 1.0 : 0.0;
    t.ok = h > log_slice - kMaxEnergyError;
    t.divergent = !t.ok;
    t.sum_accept = std::isfinite(h) ? std::min(1.0, std::exp(h - h0)) : 0.0;
    t.n_leaves = 1;
    t.minus = z;
    t.plus = std::move(z);
    return t;
  }

  Subtree t = build_tree(target, edge, log_slice, direction, depth - 1, eps, h0, rng, n_leapfrog);
  if (!t.ok) return t;

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Subtree t2 = build_tree(target, direction < 0 ? t.minus : t.plus, log_slice, direction,
                          depth - 1, eps, h0, rng, n_leapfrog);
  if (direction < 0) {
    t.minus = std::move(t2.minus);
  } else {
    t.plus = std::move(t2.plus);
  }
  const double total = t.n_valid + t2.n_valid;
  if (total > 0.0 && unif(rng) < t2.n_valid / total) {
    t.proposal = std::move(t2.proposal);
  }
  t.n_valid = total;
  t.ok = t2.ok && no_uturn(t.minus, t.plus);
  t.divergent = t2.divergent;
  t.sum_accept += t2.sum_accept;
  t.n_leaves += t2.n_leaves;
  return t;
}

}  // namespace

PhasePoint make_point(const LogDensity& target, Vector theta, Vector rho) {
  PhasePoint z;
  z.theta = std::move(theta);
  z.rho = std::move(rho);
  z.logp = evaluate(target, z.theta, z.grad);
  return z;
}

void leapfrog(const LogDensity& target, PhasePoint& z, double eps) {
  z.rho += 0.5 * eps * z.grad;
  z.theta += eps * z.rho;
  z.logp = evaluate(target, z.theta, z.grad);
  z.rho += 0.5 * eps * z.grad;
}

ChainState initial_state(const LogDensity& target, Vector theta) {
  ChainState s;
  s.theta = std::move(theta);
  s.logp = evaluate(target, s.theta, s.grad);
  return s;
}

ChainState transition(const LogDensity& target, const ChainState& current, double eps,
                      int max_tree_depth, Rng& rng, TransitionInfo& info) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);

  PhasePoint z0;
  z0.theta = current.theta;
  z0.grad = current.grad;
  z0.logp = current.logp;
  z0.rho = Vector::NullaryExpr(current.theta.size(), [&](Index) { return normal(rng); });
  const double h0 = z0.hamiltonian();
  // log of u ~ U(0, exp(h0))
  const double log_slice = h0 - expo(rng);

  info = TransitionInfo{};
  PhasePoint minus = z0;
  PhasePoint plus = z0;
  ChainState next = current;
  double n_valid = 1.0;
  double sum_accept = 0.0;
  int n_leaves = 0;
  bool keep_going = true;
  int depth = 0;
  while (keep_going && depth < max_tree_depth) {
    const int direction = unif(rng) < 0.5 ? -1 : 1;
    Subtree t = build_tree(target, direction < 0 ? minus : plus, log_slice, direction, depth, eps,
                           h0, rng, info.n_leapfrog);
    if (direction < 0) {
      minus = std::move(t.minus);
    } else {
      plus = std::move(t.plus);
    }
    if (t.ok && unif(rng) < t.n_valid / n_valid) {
      next = std::move(t.proposal);
    }
    n_valid += t.n_valid;
    keep_going = t.ok && no_uturn(minus, plus);
    info.divergent = info.divergent || t.divergent;
    sum_accept += t.sum_accept;
    n_leaves += t.n_leaves;
    ++depth;
  }
  info.tree_depth = depth;
  info.accept_stat = n_leaves > 0 ? sum_accept / n_leaves : 0.0;
  return next;
}

}  // namespace nsgp::nuts
