#include "nsgp/model.hpp"

#include <cmath>
#include <sstream>

#include "nsgp/errors.hpp"
#include "nsgp/kernel.hpp"

namespace nsgp {

double Hyperparams::mean(Component c) const {
  switch (c) {
    case Component::ell: return mu_ell;
    case Component::sigma: return mu_sigma;
    case Component::omega: return mu_omega;
  }
  return 0.0;
}

double Hyperparams::log_mean(Component c) const {
  return mu_in_log_domain ? mean(c) : std::log(mean(c));
}

double Hyperparams::alpha(Component c) const {
  switch (c) {
    case Component::ell: return alpha_ell;
    case Component::sigma: return alpha_sigma;
    case Component::omega: return alpha_omega;
  }
  return 0.0;
}

double Hyperparams::beta(Component c) const {
  switch (c) {
    case Component::ell: return beta_ell;
    case Component::sigma: return beta_sigma;
    case Component::omega: return beta_omega;
  }
  return 0.0;
}

void Hyperparams::validate() const {
  for (Component c : kComponents) {
    if (!(alpha(c) > 0.0) || !std::isfinite(alpha(c))) {
      throw DomainError("alpha_" + std::string(name_of(c)) + " must be strictly positive");
    }
    if (!(beta(c) > 0.0) || !std::isfinite(beta(c))) {
      throw DomainError("beta_" + std::string(name_of(c)) + " must be strictly positive");
    }
    if (!std::isfinite(mean(c)) || (!mu_in_log_domain && !(mean(c) > 0.0))) {
      throw DomainError("mu_" + std::string(name_of(c)) +
                        " must be positive (or set mu_in_log_domain)");
    }
  }
}

bool VariantFlags::nonstationary(Component c) const {
  switch (c) {
    case Component::ell: return nonstat_ell;
    case Component::sigma: return nonstat_sigma;
    case Component::omega: return nonstat_omega;
  }
  return false;
}

std::string VariantFlags::name() const {
  std::string parts;
  for (Component c : {Component::omega, Component::sigma, Component::ell}) {
    if (nonstationary(c)) {
      if (!parts.empty()) parts += ',';
      parts += name_of(c);
    }
  }
  return parts.empty() ? "GP" : parts + "-GP";
}

VariantFlags VariantFlags::from_name(std::string_view name) {
  for (const VariantFlags& f : all_combinations()) {
    if (f.name() == name) return f;
  }
  throw ParseError("unknown model variant '" + std::string(name) + "'");
}

std::array<VariantFlags, 8> VariantFlags::all_combinations() {
  std::array<VariantFlags, 8> out;
  for (int bits = 0; bits < 8; ++bits) {
    out[bits] = VariantFlags{(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0};
  }
  return out;
}

std::vector<VariantFlags> VariantFlags::table_variants() {
  return {
      {false, false, false}, {true, false, false}, {false, true, false}, {false, false, true},
      {true, true, false},   {true, false, true},  {true, true, true},
  };
}

LatentState LatentState::zeros(Index n, VariantFlags flags, Frame frame) {
  LatentState s;
  s.n = n;
  s.flags = flags;
  s.frame = frame;
  for (Component c : kComponents) {
    s[c] = Vector::Zero(flags.nonstationary(c) ? n : 1);
  }
  return s;
}

Vector& LatentState::operator[](Component c) {
  switch (c) {
    case Component::ell: return ell;
    case Component::sigma: return sigma;
    case Component::omega: return omega;
  }
  return ell;
}

const Vector& LatentState::operator[](Component c) const {
  return const_cast<LatentState&>(*this)[c];
}

Index LatentState::size(Component c) const { return flags.nonstationary(c) ? n : 1; }

Vector LatentState::expanded(Component c) const {
  const Vector& v = (*this)[c];
  if (flags.nonstationary(c)) return v;
  return Vector::Constant(n, v[0]);
}

Index LatentState::packed_size() const {
  return size(Component::ell) + size(Component::sigma) + size(Component::omega);
}

Vector LatentState::pack() const {
  Vector out(packed_size());
  out << ell, sigma, omega;
  return out;
}

LatentState LatentState::unpack(const Vector& packed) const {
  if (packed.size() != packed_size()) {
    throw DimensionError("LatentState::unpack: packed vector has wrong length");
  }
  LatentState out = *this;
  Index offset = 0;
  for (Component c : kComponents) {
    out[c] = packed.segment(offset, size(c));
    offset += size(c);
  }
  return out;
}

void LatentState::validate() const {
  if (n < 1) throw DimensionError("LatentState: n must be at least 1");
  for (Component c : kComponents) {
    const Vector& v = (*this)[c];
    if (v.size() != size(c)) {
      std::ostringstream msg;
      msg << "LatentState: component " << name_of(c) << " has length " << v.size()
          << ", expected " << size(c);
      throw DimensionError(msg.str());
    }
    if (frame == Frame::natural) {
      const Eigen::ArrayXd e = v.array().exp();
      if (!e.allFinite() || (e <= 0.0).any()) {
        throw DomainError("LatentState: exp(" + std::string(name_of(c)) +
                          ") not finite and positive");
      }
    } else if (!v.allFinite()) {
      throw DomainError("LatentState: non-finite whitened coordinate");
    }
  }
}

PriorFactors build_prior_factors(const Vector& x, const Hyperparams& theta) {
  if (x.size() < 1) throw DimensionError("build_prior_factors: need at least one input");
  theta.validate();
  PriorFactors out;
  for (Component c : kComponents) {
    const Matrix k = kernel::se_kernel(x, x, theta.alpha(c), theta.beta(c)).entries;
    linalg::Cholesky chol = linalg::jittered_cholesky(k, linalg::JitterPolicy::always);
    PriorFactor& f = out.factor[index_of(c)];
    f.lower = chol.lower();
    f.jitter = chol.jitter;
    f.log_mean = theta.log_mean(c);
    f.alpha = theta.alpha(c);
    f.beta = theta.beta(c);
  }
  return out;
}

namespace {

void check_factor_size(const PriorFactors& factors, Index n) {
  if (factors[Component::ell].lower.rows() != n) {
    throw DimensionError("prior factors were built for a different number of inputs");
  }
}

}  // namespace

LatentState whiten(const LatentState& state, const PriorFactors& factors) {
  if (state.frame != Frame::natural) throw FrameError("whiten: state is not in the natural frame");
  check_factor_size(factors, state.n);
  LatentState out = state;
  out.frame = Frame::whitened;
  for (Component c : kComponents) {
    if (!state.flags.nonstationary(c)) continue;
    const PriorFactor& f = factors[c];
    out[c] = f.lower.triangularView<Eigen::Lower>().solve(
        (state[c].array() - f.log_mean).matrix());
  }
  return out;
}

LatentState unwhiten(const LatentState& state, const PriorFactors& factors) {
  if (state.frame != Frame::whitened) {
    throw FrameError("unwhiten: state is not in the whitened frame");
  }
  check_factor_size(factors, state.n);
  LatentState out = state;
  out.frame = Frame::natural;
  for (Component c : kComponents) {
    if (!state.flags.nonstationary(c)) continue;
    const PriorFactor& f = factors[c];
    out[c] = (f.lower.triangularView<Eigen::Lower>() * state[c]).array() + f.log_mean;
  }
  return out;
}

Vector whitened_gradient(const Vector& g_natural, const PriorFactors& factors, Component c) {
  const Matrix& lower = factors[c].lower;
  if (g_natural.size() != lower.rows()) {
    throw DimensionError("whitened_gradient: gradient length does not match the factor");
  }
  return lower.triangularView<Eigen::Lower>().transpose() * g_natural;
}

}  // namespace nsgp
