#include <doctest.h>

#include <cmath>
#include <random>

#include "nsgp/errors.hpp"
#include "nsgp/kernel.hpp"
#include "nsgp/model.hpp"
#include "support/oracles.hpp"

using namespace nsgp;

namespace {

LatentState random_state(std::mt19937_64& rng, Index n, VariantFlags flags) {
  LatentState s = LatentState::zeros(n, flags);
  for (Component c : kComponents) s[c] = oracle::normal(rng, s.size(c), 0.5).array() - 1.0;
  return s;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("hyperparameter defaults and log means") {
  const Hyperparams t;
  CHECK(t.mean(Component::ell) == 0.2);
  CHECK(t.mean(Component::sigma) == 0.5);
  CHECK(t.mean(Component::omega) == 0.1);
  CHECK(t.beta(Component::ell) == 0.1);
  CHECK(t.beta(Component::sigma) == 0.1);
  CHECK(t.beta(Component::omega) == 0.2);
  CHECK(t.alpha(Component::sigma) == 1.0);
  CHECK(t.log_mean(Component::ell) == doctest::Approx(std::log(0.2)));
  Hyperparams lit = t;
  lit.mu_in_log_domain = true;
  CHECK(lit.log_mean(Component::omega) == 0.1);
  lit.mu_omega = -2.0;
  CHECK_NOTHROW(lit.validate());
  Hyperparams bad = t;
  bad.alpha_ell = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = t;
  bad.mu_sigma = -1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("variant names round trip") {
  for (const VariantFlags& f : VariantFlags::all_combinations()) {
    CHECK(VariantFlags::from_name(f.name()) == f);
  }
  CHECK(VariantFlags{}.name() == "GP");
  CHECK(VariantFlags{true, true, true}.name() == "omega,sigma,ell-GP");
  CHECK(VariantFlags{false, false, true}.name() == "ell-GP");
  CHECK(VariantFlags::table_variants().size() == 7);
  CHECK_THROWS_AS(VariantFlags::from_name("tau-GP"), ParseError);
}

TEST_CASE("latent state shapes, packing and validation") {
  std::mt19937_64 rng(1);
  const VariantFlags flags{true, false, true};
  const LatentState s = random_state(rng, 6, flags);
  CHECK(s.size(Component::omega) == 6);
  CHECK(s.size(Component::sigma) == 1);
  CHECK(s.packed_size() == 13);
  const LatentState back = s.unpack(s.pack());
  for (Component c : kComponents) CHECK(back[c] == s[c]);
  CHECK(s.expanded(Component::sigma) == Vector::Constant(6, s.sigma[0]));
  LatentState bad = s;
  bad.ell.resize(5);
  CHECK_THROWS_AS(bad.validate(), DimensionError);
  bad = s;
  bad.omega[2] = 800.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("single input factors are alpha") {
  Hyperparams t;
  t.alpha_ell = 1.5;
  t.alpha_sigma = 0.7;
  const PriorFactors f = build_prior_factors(Vector::Constant(1, 0.4), t);
  CHECK(f[Component::ell].lower(0, 0) == doctest::Approx(1.5).epsilon(1e-7));
  CHECK(f[Component::sigma].lower(0, 0) == doctest::Approx(0.7).epsilon(1e-7));
  CHECK(f[Component::omega].lower(0, 0) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("duplicate inputs factor only with jitter") {
  const Vector x = Vector::Constant(2, 0.5);
  const PriorFactors f = build_prior_factors(x, Hyperparams{});
  for (Component c : kComponents) {
    CHECK(f[c].jitter > 0.0);
    CHECK(f[c].lower.allFinite());
  }
}

TEST_CASE("factors reproduce the prior covariance") {
  std::mt19937_64 rng(2);
  const Vector x = oracle::uniform(rng, 20, 0.0, 1.0);
  Hyperparams t;
  t.beta_ell = t.beta_sigma = t.beta_omega = 0.1;
  const PriorFactors f = build_prior_factors(x, t);
  for (Component c : kComponents) {
    Matrix k = oracle::se_matrix(x, x, 1.0, 0.1);
    k.diagonal().array() += f[c].jitter;
    const Matrix ll = f[c].lower * f[c].lower.transpose();
    CHECK((ll - k).norm() <= 1e-8 * k.norm());
    CHECK(f[c].jitter <= 1e-2 * 1.0);
  }
}

TEST_CASE("whitening inverts the factor and round trips") {
  std::mt19937_64 rng(3);
  const Vector x = oracle::uniform(rng, 9, 0.0, 1.0);
  const Hyperparams t;
  const PriorFactors f = build_prior_factors(x, t);
  for (const VariantFlags& flags : VariantFlags::all_combinations()) {
    LatentState u = LatentState::zeros(9, flags, Frame::whitened);
    for (Component c : kComponents) u[c] = oracle::normal(rng, u.size(c));
    const LatentState v = unwhiten(u, f);
    for (Component c : kComponents) {
      if (flags.nonstationary(c)) {
        const Vector expect = (f[c].lower * u[c]).array() + t.log_mean(c);
        CHECK((v[c] - expect).cwiseAbs().maxCoeff() <= 1e-10);
      } else {
        CHECK(v[c] == u[c]);
      }
    }
    const LatentState w = whiten(v, f);
    CHECK(w.frame == Frame::whitened);
    for (Component c : kComponents) CHECK((w[c] - u[c]).cwiseAbs().maxCoeff() <= 1e-10);

    const LatentState s = random_state(rng, 9, flags);
    const LatentState rt = unwhiten(whiten(s, f), f);
    for (Component c : kComponents) CHECK((rt[c] - s[c]).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("prior mean whitens to zero") {
  const Vector x = Vector::LinSpaced(5, 0.0, 1.0);
  const Hyperparams t;
  const PriorFactors f = build_prior_factors(x, t);
  const VariantFlags flags{true, true, true};
  LatentState mu = LatentState::zeros(5, flags);
  for (Component c : kComponents) mu[c].setConstant(t.log_mean(c));
  const LatentState w = whiten(mu, f);
  for (Component c : kComponents) CHECK(w[c].cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  const LatentState back = unwhiten(LatentState::zeros(5, flags, Frame::whitened), f);
  for (Component c : kComponents) {
    CHECK((back[c].array() - t.log_mean(c)).abs().maxCoeff() == doctest::Approx(0.0));
  }
}

TEST_CASE("frame mismatch is rejected") {
  const PriorFactors f = build_prior_factors(Vector::LinSpaced(3, 0.0, 1.0), Hyperparams{});
  const LatentState nat = LatentState::zeros(3, VariantFlags{true, true, true});
  const LatentState wh = LatentState::zeros(3, VariantFlags{true, true, true}, Frame::whitened);
  CHECK_THROWS_AS(whiten(wh, f), FrameError);
  CHECK_THROWS_AS(unwhiten(nat, f), FrameError);
}

TEST_CASE("whitened gradient is L transpose g") {
  std::mt19937_64 rng(4);
  const Vector x = oracle::uniform(rng, 10, 0.0, 1.0);
  const PriorFactors f = build_prior_factors(x, Hyperparams{});
  CHECK(whitened_gradient(Vector::Zero(10), f, Component::ell).isZero());
  const Vector g = oracle::normal(rng, 10);
  const Vector expect = f[Component::sigma].lower.transpose() * g;
  CHECK((whitened_gradient(g, f, Component::sigma) - expect).norm() <= 1e-12);
  CHECK_THROWS_AS(whitened_gradient(Vector::Zero(4), f, Component::ell), DimensionError);

  PriorFactors identity = f;
  identity.factor[0].lower = Matrix::Identity(10, 10);
  CHECK(whitened_gradient(g, identity, Component::ell) == g);
}

TEST_CASE("whitened prior draws are standard normal") {
  std::mt19937_64 rng(5);
  const Index n = 10;
  const int draws = 10000;
  const Vector x = oracle::uniform(rng, n, 0.0, 1.0);
  const Hyperparams t;
  const PriorFactors f = build_prior_factors(x, t);
  Matrix k = oracle::se_matrix(x, x, t.alpha_ell, t.beta_ell);
  k.diagonal().array() += f[Component::ell].jitter;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(k);
  const Matrix root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

  const VariantFlags flags{false, false, true};
  double sum = 0.0, sq = 0.0;
  for (int d = 0; d < draws; ++d) {
    LatentState s = LatentState::zeros(n, flags);
    s.ell = (root * oracle::normal(rng, n)).array() + t.log_mean(Component::ell);
    const Vector w = whiten(s, f).ell;
    sum += w.sum();
    sq += w.squaredNorm();
  }
  const double total = static_cast<double>(draws * n);
  const double mean = sum / total;
  const double var = sq / total - mean * mean;
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(total));
  CHECK(var >= 0.9);
  CHECK(var <= 1.1);
}

}
