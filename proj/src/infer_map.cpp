#include "nsgp/infer_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nsgp/errors.hpp"
#include "nsgp/kernel.hpp"
#include "nsgp/linalg.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace nsgp {
namespace {

constexpr double kArmijoSlope = 1e-4;
constexpr double kContraction = 0.5;
constexpr double kInitialStep = 1.0;
constexpr double kMinStep = 1e-20;
constexpr double kInitScale = 0.1;

struct RestartOutcome {
  RestartReport report;
  LatentState whitened;
  bool ok = false;
};

LatentState initial_point(const LatentPosterior& posterior, int restart, std::uint64_t seed) {
  LatentState start = posterior.prior_mean(Frame::whitened);
  if (restart == 0) return start;
  auto rng = detail::make_rng(seed, static_cast<std::uint64_t>(restart), detail::kMapRestart);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Component c : kComponents) {
    Vector& v = start[c];
    for (Index i = 0; i < v.size(); ++i) v[i] += kInitScale * normal(rng);
  }
  return start;
}

// Gradient ascent with Armijo backtracking. The first trial step is 1; later
// iterations start from twice the last accepted step.
RestartOutcome ascend(const LatentPosterior& posterior, int restart, const MapOptions& opts) {
  RestartOutcome out;
  out.report.restart = restart;
  LatentState current = initial_point(posterior, restart, opts.seed);
  Evaluation eval;
  try {
    eval = posterior.evaluate_whitened(current);
  } catch (const std::exception& e) {
    out.report.error = std::string("initial point: ") + e.what();
    return out;
  }
  out.report.initial_mll = eval.value.total;
  if (opts.record_trace) out.report.trace.push_back(eval.value.total);

  Vector x = current.pack();
  Vector g = eval.gradient.pack();
  double f = eval.value.total;
  double step = kInitialStep;
  int it = 0;
  for (; it < opts.max_iters; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.grad_tol) {
      out.report.converged = true;
      break;
    }
    const double slope = g.squaredNorm();
    bool accepted = false;
    for (double t = step; t >= kMinStep; t *= kContraction) {
      LatentState trial = current.unpack(x + t * g);
      Evaluation trial_eval;
      try {
        trial_eval = posterior.evaluate_whitened(trial);
      } catch (const std::exception&) {
        continue;  // outside the numerically valid region; shrink
      }
      if (trial_eval.value.total >= f + kArmijoSlope * t * slope) {
        current = std::move(trial);
        x = current.pack();
        f = trial_eval.value.total;
        g = trial_eval.gradient.pack();
        step = 2.0 * t;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no ascent possible at floating-point resolution
    if (opts.record_trace) out.report.trace.push_back(f);
  }
  if (!out.report.converged && g.lpNorm<Eigen::Infinity>() <= opts.grad_tol) {
    out.report.converged = true;
  }
  out.report.iterations = it;
  out.report.final_mll = f;
  out.whitened = std::move(current);
  out.ok = true;
  return out;
}

}  // namespace

MapResult fit_map(const LatentPosterior& posterior, const MapOptions& opts) {
  if (opts.restarts < 1) throw std::invalid_argument("fit_map: restarts must be >= 1");
  if (opts.max_iters < 0) throw std::invalid_argument("fit_map: max_iters must be >= 0");
  if (!(opts.grad_tol > 0.0)) throw std::invalid_argument("fit_map: grad_tol must be > 0");
  if (posterior.n() < 2) throw DimensionError("fit_map: need at least two observations");

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(opts.restarts));
  detail::parallel_for(opts.restarts,
                       [&](int r) { outcomes[static_cast<std::size_t>(r)] = ascend(posterior, r, opts); });

  int best = -1;
  for (int r = 0; r < opts.restarts; ++r) {
    const RestartOutcome& o = outcomes[static_cast<std::size_t>(r)];
    if (!o.ok) continue;
    if (best < 0 || o.report.final_mll > outcomes[static_cast<std::size_t>(best)].report.final_mll) {
      best = r;
    }
  }

  MapResult result;
  result.restarts_run = opts.restarts;
  for (auto& o : outcomes) result.restarts.push_back(o.report);
  if (best < 0) {
    std::vector<std::string> diagnostics;
    for (const auto& o : outcomes) {
      diagnostics.push_back("restart " + std::to_string(o.report.restart) + ": " + o.report.error);
    }
    throw OptimizationError("fit_map: every restart failed", std::move(diagnostics));
  }
  const RestartOutcome& winner = outcomes[static_cast<std::size_t>(best)];
  result.state = unwhiten(winner.whitened, posterior.factors());
  result.mll = posterior.value(result.state);
  result.converged = winner.report.converged;
  result.iterations = winner.report.iterations;
  return result;
}

MapResult fit_map(const Vector& y, const Vector& x, const Hyperparams& theta,
                  const VariantFlags& flags, const MapOptions& opts) {
  return fit_map(LatentPosterior(x, y, theta, flags), opts);
}

FunctionPosterior map_function_posterior(const LatentState& state, const Vector& y,
                                         const Vector& x) {
  if (state.frame != Frame::natural) {
    throw FrameError("map_function_posterior: state is not in the natural frame");
  }
  if (x.size() != y.size() || x.size() != state.n) {
    throw DimensionError("map_function_posterior: x, y and state sizes differ");
  }
  state.validate();
  const Vector ell = state.expanded(Component::ell).array().exp();
  const Vector sigma = state.expanded(Component::sigma).array().exp();
  const Vector noise = (2.0 * state.expanded(Component::omega).array()).exp();

  const Matrix kf = kernel::nonstationary_kernel(x, ell, sigma).entries;
  Matrix ky = kf;
  ky.diagonal() += noise;
  const linalg::Cholesky chol = linalg::jittered_cholesky(ky, linalg::JitterPolicy::on_failure);

  FunctionPosterior out;
  out.mean = kf * chol.solve(y);
  const Matrix v = chol.llt.matrixL().solve(kf);
  out.cov = kf - v.transpose() * v;
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

}  // namespace nsgp
