#include "nsgp/objective.hpp"

#include <cmath>

#include "nsgp/errors.hpp"
#include "nsgp/kernel.hpp"
#include "nsgp/linalg.hpp"

namespace nsgp {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // log(2 pi)

struct DataPart {
  double value = 0.0;
  // Per-entry derivatives with respect to the expanded log-latent vectors.
  Vector g_ell;
  Vector g_sigma;
  Vector g_omega;
};

// log N(y | 0, K_f + Omega) and, optionally, its gradient. With
// A = a a^T - K_y^{-1}, a = K_y^{-1} y:
//   d/d log l_i = sum_j A_ij K_ij D_ij      (plus-matrix trace, D from the kernel)
//   d/d log s_i = sum_j A_ij K_ij           (K_ij scales with s_i, K_ii with s_i^2)
//   d/d log w_i = A_ii w_i^2
DataPart data_part(const Vector& x, const Vector& y, const Vector& log_ell,
                   const Vector& log_sigma, const Vector& log_omega, bool with_gradient) {
  const Index n = x.size();
  const Vector ell = log_ell.array().exp();
  const Vector sigma = log_sigma.array().exp();
  const Vector noise = (2.0 * log_omega.array()).exp();

  const Matrix kf = kernel::nonstationary_kernel(x, ell, sigma).entries;
  Matrix ky = kf;
  ky.diagonal() += noise;
  const linalg::Cholesky chol = linalg::jittered_cholesky(ky, linalg::JitterPolicy::on_failure);
  const Vector a = chol.solve(y);

  DataPart out;
  out.value = -0.5 * y.dot(a) - 0.5 * chol.log_det() - 0.5 * static_cast<double>(n) * kLog2Pi;
  if (!with_gradient) return out;

  Matrix weights = a * a.transpose() - chol.solve(Matrix(Matrix::Identity(n, n)));
  const Matrix ak = weights.cwiseProduct(kf);
  out.g_ell = ak.cwiseProduct(kernel::log_lengthscale_sensitivity(x, ell)).rowwise().sum();
  out.g_sigma = ak.rowwise().sum();
  out.g_omega = weights.diagonal().cwiseProduct(noise);
  return out;
}

}  // namespace

double MLLValue::prior(Component c) const {
  switch (c) {
    case Component::ell: return prior_ell;
    case Component::sigma: return prior_sigma;
    case Component::omega: return prior_omega;
  }
  return 0.0;
}

Vector& LatentGradient::operator[](Component c) {
  switch (c) {
    case Component::ell: return ell;
    case Component::sigma: return sigma;
    case Component::omega: return omega;
  }
  return ell;
}

const Vector& LatentGradient::operator[](Component c) const {
  return const_cast<LatentGradient&>(*this)[c];
}

Vector LatentGradient::pack() const {
  Vector out(ell.size() + sigma.size() + omega.size());
  out << ell, sigma, omega;
  return out;
}

LatentPosterior::LatentPosterior(Vector x, Vector y, Hyperparams theta, VariantFlags flags,
                                 double data_weight)
    : x_(std::move(x)),
      y_(std::move(y)),
      theta_(theta),
      flags_(flags),
      data_weight_(data_weight) {
  if (x_.size() != y_.size()) {
    throw DimensionError("LatentPosterior: x and y lengths differ");
  }
  if (x_.size() < 1) throw DimensionError("LatentPosterior: need at least one observation");
  if (!(data_weight_ >= 0.0)) throw DomainError("LatentPosterior: data weight must be >= 0");
  factors_ = build_prior_factors(x_, theta_);
}

void LatentPosterior::check_shape(const LatentState& state, Frame frame) const {
  if (state.frame != frame) {
    throw FrameError(frame == Frame::natural ? "expected a natural-frame latent state"
                                             : "expected a whitened-frame latent state");
  }
  if (state.n != n()) throw DimensionError("latent state size does not match the data");
  if (!(state.flags == flags_)) {
    throw DimensionError("latent state variant flags do not match the posterior");
  }
  state.validate();
}

LatentState LatentPosterior::prior_mean(Frame frame) const {
  LatentState s = LatentState::zeros(n(), flags_, Frame::whitened);
  for (Component c : kComponents) {
    if (!flags_.nonstationary(c)) s[c].setConstant(factors_[c].log_mean);
  }
  return frame == Frame::whitened ? s : unwhiten(s, factors_);
}

Evaluation LatentPosterior::evaluate_impl(const LatentState& natural, const LatentState* whitened,
                                          bool with_gradient) const {
  Evaluation out;
  const double dim = static_cast<double>(n());

  DataPart data;
  if (data_weight_ > 0.0) {
    data = data_part(x_, y_, natural.expanded(Component::ell),
                     natural.expanded(Component::sigma), natural.expanded(Component::omega),
                     with_gradient);
  } else if (with_gradient) {
    data.g_ell = data.g_sigma = data.g_omega = Vector::Zero(n());
  }
  out.value.data_term = data_weight_ * data.value;

  double prior_total = 0.0;
  for (Component c : kComponents) {
    const PriorFactor& f = factors_[c];
    double prior = 0.0;
    Vector grad;
    const Vector* g_data = nullptr;
    if (with_gradient) {
      g_data = c == Component::ell ? &data.g_ell
               : c == Component::sigma ? &data.g_sigma
                                       : &data.g_omega;
    }

    if (flags_.nonstationary(c)) {
      const auto lower = f.lower.triangularView<Eigen::Lower>();
      const Vector w = whitened != nullptr
                           ? Vector((*whitened)[c])
                           : Vector(lower.solve((natural[c].array() - f.log_mean).matrix()));
      prior = -0.5 * w.squaredNorm() - f.lower.diagonal().array().log().sum() -
              0.5 * dim * kLog2Pi;
      if (with_gradient) {
        if (whitened != nullptr) {
          grad = lower.transpose() * (data_weight_ * *g_data) - w;
        } else {
          grad = data_weight_ * *g_data - Vector(lower.transpose().solve(w));
        }
      }
    } else {
      const double dev = natural[c][0] - f.log_mean;
      const double var = f.alpha * f.alpha;
      prior = -0.5 * dev * dev / var - std::log(f.alpha) - 0.5 * kLog2Pi;
      if (with_gradient) {
        grad = Vector::Constant(1, data_weight_ * g_data->sum() - dev / var);
      }
    }

    switch (c) {
      case Component::ell: out.value.prior_ell = prior; break;
      case Component::sigma: out.value.prior_sigma = prior; break;
      case Component::omega: out.value.prior_omega = prior; break;
    }
    prior_total += prior;
    if (with_gradient) out.gradient[c] = std::move(grad);
  }
  out.value.total = out.value.data_term + prior_total;
  if (!std::isfinite(out.value.total)) {
    throw NumericalError("marginal log likelihood is not finite");
  }
  return out;
}

MLLValue LatentPosterior::value(const LatentState& natural) const {
  check_shape(natural, Frame::natural);
  return evaluate_impl(natural, nullptr, false).value;
}

Evaluation LatentPosterior::evaluate(const LatentState& natural) const {
  check_shape(natural, Frame::natural);
  return evaluate_impl(natural, nullptr, true);
}

Evaluation LatentPosterior::evaluate_whitened(const LatentState& whitened) const {
  check_shape(whitened, Frame::whitened);
  const LatentState natural = unwhiten(whitened, factors_);
  natural.validate();
  return evaluate_impl(natural, &whitened, true);
}

MLLValue mll(const Vector& y, const Vector& x, const LatentState& state, const Hyperparams& theta,
             const VariantFlags& flags) {
  return LatentPosterior(x, y, theta, flags).value(state);
}

LatentGradient mll_gradient(const Vector& y, const Vector& x, const LatentState& state,
                            const Hyperparams& theta, const VariantFlags& flags) {
  return LatentPosterior(x, y, theta, flags).evaluate(state).gradient;
}

}  // namespace nsgp
