#include "nsgp/predict.hpp"

#include <array>
#include <cmath>
#include <optional>

#include "nsgp/errors.hpp"
#include "nsgp/infer_hmc.hpp"
#include "nsgp/kernel.hpp"
#include "nsgp/linalg.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace nsgp {
namespace {

// Adds `nugget` wherever a row input equals a column input.
void add_nugget(Matrix& k, const Vector& rows, const Vector& cols, double nugget) {
  if (nugget == 0.0) return;
  for (Index j = 0; j < cols.size(); ++j) {
    for (Index i = 0; i < rows.size(); ++i) {
      if (rows[i] == cols[j]) k(i, j) += nugget;
    }
  }
}

// The parts of a latent conditional that do not depend on the latent values:
//   mean = mu + V^T L^{-1} (v - mu),  cov = K** - V^T V,  V = L^{-1} K(x, x*).
class LatentExtrapolator {
 public:
  LatentExtrapolator(const Vector& x, const Vector& x_star, const Hyperparams& theta, Component c)
      : log_mean_(theta.log_mean(c)) {
    const double alpha = theta.alpha(c);
    const double beta = theta.beta(c);
    const Matrix k = kernel::se_kernel(x, x, alpha, beta).entries;
    const linalg::Cholesky chol = linalg::jittered_cholesky(k, linalg::JitterPolicy::always);
    lower_ = chol.lower();

    Matrix k_cross = kernel::se_kernel(x, x_star, alpha, beta).entries;
    add_nugget(k_cross, x, x_star, chol.jitter);
    Matrix k_star = kernel::se_kernel(x_star, x_star, alpha, beta).entries;
    add_nugget(k_star, x_star, x_star, chol.jitter);

    projection_ = lower_.triangularView<Eigen::Lower>().solve(k_cross);
    cov_ = k_star - projection_.transpose() * projection_;
    cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
  }

  LatentConditional conditional(const Vector& latent) const {
    if (latent.size() != lower_.rows()) {
      throw DimensionError("latent_conditional: latent length does not match x");
    }
    const Vector w =
        lower_.triangularView<Eigen::Lower>().solve((latent.array() - log_mean_).matrix());
    LatentConditional out;
    out.mean = (projection_.transpose() * w).array() + log_mean_;
    out.cov = cov_;
    return out;
  }

 private:
  double log_mean_;
  Matrix lower_;
  Matrix projection_;
  Matrix cov_;
};

// Conditionals for every nonstationary component of one variant.
struct Extrapolators {
  std::array<std::optional<LatentExtrapolator>, 3> by_component;

  Extrapolators(const Vector& x, const Vector& x_star, const Hyperparams& theta,
                const VariantFlags& flags) {
    for (Component c : kComponents) {
      if (flags.nonstationary(c)) by_component[index_of(c)].emplace(x, x_star, theta, c);
    }
  }
};

PredictiveMixture predict_one(const LatentState& state, const Vector& y, const Vector& x,
                              const Vector& x_star, const Extrapolators& ex, int s,
                              std::uint64_t seed) {
  if (state.frame != Frame::natural) throw FrameError("predict: state is not in the natural frame");
  if (x.size() != y.size() || x.size() != state.n) {
    throw DimensionError("predict: x, y and state sizes differ");
  }
  state.validate();
  const Index n_star = x_star.size();

  std::array<LatentConditional, 3> cond;
  for (Component c : kComponents) {
    const auto& e = ex.by_component[index_of(c)];
    if (e) {
      cond[index_of(c)] = e->conditional(state[c]);
    } else {
      cond[index_of(c)].mean = Vector::Constant(n_star, state[c][0]);
    }
  }

  // Target latent draws: conditional means for s == 1, random draws otherwise.
  std::vector<Vector> log_ell(static_cast<std::size_t>(s), cond[index_of(Component::ell)].mean);
  std::vector<Vector> log_sigma(static_cast<std::size_t>(s),
                                cond[index_of(Component::sigma)].mean);
  if (s > 1) {
    auto rng = detail::make_rng(seed, 0, detail::kPrediction);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Component c : {Component::ell, Component::sigma}) {
      if (!ex.by_component[index_of(c)]) continue;
      const LatentConditional& lc = cond[index_of(c)];
      const Matrix lower =
          linalg::jittered_cholesky(lc.cov, linalg::JitterPolicy::always).lower();
      auto& draws = c == Component::ell ? log_ell : log_sigma;
      for (int j = 0; j < s; ++j) {
        const Vector z = Vector::NullaryExpr(n_star, [&](Index) { return normal(rng); });
        draws[static_cast<std::size_t>(j)] = linalg::correlate(lc.mean, lower, z);
      }
    }
  }

  const Vector ell = state.expanded(Component::ell).array().exp();
  const Vector sigma = state.expanded(Component::sigma).array().exp();
  Matrix ky = kernel::nonstationary_kernel(x, ell, sigma).entries;
  ky.diagonal() += (2.0 * state.expanded(Component::omega).array()).exp().matrix();
  const linalg::Cholesky chol = linalg::jittered_cholesky(ky, linalg::JitterPolicy::on_failure);
  const Vector a = chol.solve(y);

  PredictiveMixture mix;
  mix.components.reserve(static_cast<std::size_t>(s));
  const Vector& log_omega = cond[index_of(Component::omega)].mean;
  for (int j = 0; j < s; ++j) {
    const Vector ell_star = log_ell[static_cast<std::size_t>(j)].array().exp();
    const Vector sigma_star = log_sigma[static_cast<std::size_t>(j)].array().exp();
    const Matrix k_cross =
        kernel::nonstationary_kernel(x, x_star, ell, ell_star, sigma, sigma_star).entries;
    const Matrix k_star = kernel::nonstationary_kernel(x_star, ell_star, sigma_star).entries;
    const Matrix v = chol.llt.matrixL().solve(k_cross);

    GaussianComponent comp;
    comp.mean = k_cross.transpose() * a;
    comp.cov = k_star - v.transpose() * v;
    comp.cov = 0.5 * (comp.cov + comp.cov.transpose()).eval();
    comp.log_ell = log_ell[static_cast<std::size_t>(j)];
    comp.log_sigma = log_sigma[static_cast<std::size_t>(j)];
    comp.log_omega = log_omega;
    comp.noise_var = (2.0 * log_omega.array()).exp();
    mix.components.push_back(std::move(comp));
  }
  return mix;
}

std::uint64_t sample_seed(std::uint64_t seed, std::size_t i) {
  return seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i);
}

}  // namespace

LatentConditional latent_conditional(const Vector& latent, const Vector& x, const Vector& x_star,
                                     const Hyperparams& theta, Component c) {
  if (x.size() < 1) throw DimensionError("latent_conditional: x is empty");
  theta.validate();
  return LatentExtrapolator(x, x_star, theta, c).conditional(latent);
}

PredictiveMixture predict_map(const LatentState& state, const Vector& y, const Vector& x,
                              const Vector& x_star, const Hyperparams& theta, int s,
                              std::uint64_t seed) {
  if (s < 1) throw std::invalid_argument("predict_map: s must be >= 1");
  theta.validate();
  const Extrapolators ex(x, x_star, theta, state.flags);
  return predict_one(state, y, x, x_star, ex, s, seed);
}

PredictiveMixture predict_hmc(const SampleSet& samples, const Vector& y, const Vector& x,
                              const Vector& x_star, const Hyperparams& theta, int s,
                              std::uint64_t seed, int thin) {
  if (s < 1) throw std::invalid_argument("predict_hmc: s must be >= 1");
  const SampleSet kept = thin > 1 ? samples.thinned(thin) : samples;
  if (kept.samples.empty()) throw std::invalid_argument("predict_hmc: empty sample set");
  theta.validate();
  const Extrapolators ex(x, x_star, theta, kept.samples.front().state.flags);

  std::vector<PredictiveMixture> parts(kept.samples.size());
  detail::parallel_for(static_cast<int>(kept.samples.size()), [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    parts[k] = predict_one(kept.samples[k].state, y, x, x_star, ex, s, sample_seed(seed, k));
  });
  PredictiveMixture mix;
  mix.components.reserve(parts.size() * static_cast<std::size_t>(s));
  for (auto& p : parts) {
    for (auto& c : p.components) mix.components.push_back(std::move(c));
  }
  return mix;
}

MixtureMoments mixture_moments(const PredictiveMixture& mix) {
  if (mix.components.empty()) throw std::invalid_argument("mixture_moments: empty mixture");
  const double w = mix.weight();
  MixtureMoments out;
  out.mean = Vector::Zero(mix.components.front().mean.size());
  for (const auto& c : mix.components) out.mean += w * c.mean;
  out.var = Vector::Zero(out.mean.size());
  for (const auto& c : mix.components) {
    out.var += w * (c.cov.diagonal() + (c.mean - out.mean).cwiseAbs2());
  }
  return out;
}

}  // namespace nsgp
