#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nsgp/dataset.hpp"
#include "nsgp/errors.hpp"
#include "nsgp/experiment.hpp"
#include "nsgp/metrics.hpp"
#include "support/oracles.hpp"

using namespace nsgp;

namespace {

std::string csv_text(const Dataset& d) {
  std::ostringstream out;
  write_csv(out, d);
  return out.str();
}

std::string numbered_csv(int rows) {
  std::ostringstream out;
  out << "x,y\n";
  for (int i = 0; i < rows; ++i) out << i << ',' << std::sin(0.3 * i) << '\n';
  return out.str();
}

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return load_csv(in);
}

std::size_t parse_error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

double ratio(const Vector& v) { return v.maxCoeff() / v.minCoeff(); }

bool constant(const Vector& v) { return v.maxCoeff() == v.minCoeff(); }

GaussianComponent component(const Vector& mean, const Vector& var, const Vector& noise) {
  GaussianComponent c;
  c.mean = mean;
  c.cov = var.asDiagonal();
  c.noise_var = noise;
  return c;
}

std::vector<Index> all_indices(Index n) {
  std::vector<Index> out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
  return out;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("generation is deterministic per seed") {
  for (const std::string& name : dataset_names()) {
    CAPTURE(name);
    CHECK(csv_text(generate_dataset(name, 0, 7)) == csv_text(generate_dataset(name, 0, 7)));
    CHECK(csv_text(generate_dataset(name, 0, 7)) != csv_text(generate_dataset(name, 0, 8)));
  }
}

TEST_CASE("standard sizes") {
  CHECK(generate_dataset("D_sigma", 0, 1).size() == 100);
  CHECK(generate_dataset("D_ell", 0, 1).size() == 150);
  CHECK(generate_dataset("D_omega_sigma", 0, 1).size() == 100);
  CHECK(generate_dataset("D_omega_ell", 0, 1).size() == 150);
  CHECK(generate_dataset("D_omega_sigma_ell", 0, 1).size() == 90);
  CHECK(generate_dataset("J_like", 0, 1).size() == 101);
  CHECK(generate_dataset("D_ell", 40, 1).size() == 40);
  CHECK_THROWS_AS(generate_dataset("nope", 0, 1), std::invalid_argument);
}

TEST_CASE("truth latents follow the family definitions") {
  const Dataset ds = generate_dataset("D_sigma", 0, 3);
  REQUIRE(ds.truth);
  CHECK(constant(*ds.truth->ell));
  CHECK(constant(*ds.truth->omega));
  CHECK_FALSE(constant(*ds.truth->sigma));

  const Dataset dl = generate_dataset("D_ell", 0, 3);
  CHECK_FALSE(constant(*dl.truth->ell));
  CHECK(constant(*dl.truth->sigma));
  CHECK(constant(*dl.truth->omega));

  const Dataset full = generate_dataset("D_omega_sigma_ell", 0, 3);
  for (Component c : kComponents) {
    CAPTURE(name_of(c));
    CHECK(ratio(*(*full.truth)[c]) >= 3.0);
  }

  const Dataset j = generate_dataset("J_like", 0, 3);
  CHECK_FALSE(j.truth->ell);
  CHECK_FALSE(j.truth->sigma);
  CHECK(j.truth->omega);
}

TEST_CASE("normalization maps to the unit ranges and round trips") {
  const Dataset d = generate_dataset("D_omega_sigma", 0, 5);
  CHECK(d.x_norm.minCoeff() == doctest::Approx(0.0));
  CHECK(d.x_norm.maxCoeff() == doctest::Approx(1.0));
  CHECK(d.y_norm.minCoeff() == doctest::Approx(-1.0));
  CHECK(d.y_norm.maxCoeff() == doctest::Approx(1.0));
  CHECK((d.norm.denormalize_y(d.y_norm) - d.y).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((d.norm.denormalize_x(d.x_norm) - d.x).cwiseAbs().maxCoeff() <= 1e-12);

  const Vector x = Vector::LinSpaced(5, 3.0, 11.0);
  const Vector y = Vector::Constant(5, 2.5);
  const Dataset flat = make_dataset("flat", x, y);
  CHECK(flat.norm.y_scale == 1.0);
  CHECK(flat.y_norm.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("csv ingestion") {
  const Dataset four = parse("x,y\n0,1\n1,2\n2,0\n3,5\n");
  CHECK(four.size() == 4);
  const Dataset s4 = split(four, 0.5, 1);
  CHECK(s4.train.size() == 2);
  CHECK(s4.test.size() == 2);

  const Dataset moto = split(parse(numbered_csv(133)), 0.5, 1);
  CHECK(moto.train.size() == 67);
  CHECK(moto.test.size() == 66);

  const Dataset flat = parse("x,y\n0,3\n1,3\n2,3\n");
  CHECK(flat.y_norm.cwiseAbs().maxCoeff() == 0.0);
  CHECK(flat.norm.y_scale == 1.0);

  CHECK(parse("x,y\n\n0,1\n\n1,2\n").size() == 2);
  CHECK(parse_error_line("x,y\n0,1\n1,abc\n") == 3);
  CHECK(parse_error_line("x,y\n0,1\n1,2,3\n4,5\n") == 3);
  CHECK(parse_error_line("x,y\n0,1\n2,inf\n") == 3);
  CHECK(parse_error_line("a,b\n0,1\n") == 1);
  CHECK_THROWS_AS(parse(""), ParseError);
}

TEST_CASE("csv round trip keeps values and truth") {
  const Dataset d = generate_dataset("D_omega_sigma_ell", 20, 2);
  const Dataset back = parse(csv_text(d));
  CHECK(back.x == d.x);
  CHECK(back.y == d.y);
  REQUIRE(back.truth);
  for (Component c : kComponents) CHECK(*(*back.truth)[c] == *(*d.truth)[c]);

  const Dataset j = generate_dataset("J_like", 0, 2);
  CHECK_FALSE(parse(csv_text(j)).truth);
}

TEST_CASE("split is sorted, disjoint and seed dependent") {
  const Dataset d = generate_dataset("D_sigma", 0, 1);
  const Dataset a = split(d, 0.5, 4);
  CHECK(a.train.size() == 50);
  CHECK(std::is_sorted(a.train.begin(), a.train.end()));
  CHECK(std::is_sorted(a.test.begin(), a.test.end()));
  std::vector<Index> both = a.train;
  both.insert(both.end(), a.test.begin(), a.test.end());
  std::sort(both.begin(), both.end());
  CHECK(both == all_indices(d.size()));
  CHECK(split(d, 0.5, 4).train == a.train);
  CHECK(split(d, 0.5, 5).train != a.train);
  CHECK_THROWS(split(d, 0.0, 1));
  CHECK_THROWS(split(d, 1.0, 1));
}

TEST_CASE("mse and nlpd") {
  const Vector y = Vector::LinSpaced(6, -1.0, 1.0);
  CHECK(mse(y, y) == 0.0);
  CHECK(mse(y, Vector::Zero(6)) == doctest::Approx(y.squaredNorm() / 6.0));
  CHECK_THROWS_AS(mse(y, Vector::Zero(5)), DimensionError);

  PredictiveMixture unit;
  unit.components.push_back(component(y, Vector::Constant(6, 0.4), Vector::Constant(6, 0.6)));
  CHECK(std::abs(nlpd(y, unit) - 0.9189385332046727) <= 1e-12);
  CHECK_THROWS_AS(nlpd(Vector::Zero(5), unit), DimensionError);
}

TEST_CASE("two-component nlpd agrees with a sampling estimate") {
  const Index n = 5;
  const Vector y = (Vector(n) << -0.4, 0.1, 0.3, 0.9, -1.2).finished();
  PredictiveMixture mix;
  mix.components.push_back(component(Vector::Constant(n, -0.2), Vector::Constant(n, 0.3),
                                     Vector::Constant(n, 0.05)));
  mix.components.push_back(component(Vector::LinSpaced(n, 0.0, 0.8), Vector::Constant(n, 0.5),
                                     Vector::Constant(n, 0.1)));

  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> pick(0, 1);
  const int draws = 1000000;
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    double density = 0.0;
    for (int k = 0; k < draws; ++k) {
      const GaussianComponent& c = mix.components[static_cast<std::size_t>(pick(rng))];
      const double var = c.cov(i, i) + c.noise_var[i];
      density += std::exp(oracle::normal_logpdf(y[i], c.mean[i], std::sqrt(var)));
    }
    total -= std::log(density / draws);
  }
  CHECK(std::abs(nlpd(y, mix) - total / n) <= 1e-3);
}

TEST_CASE("experiment runner") {
  const Dataset d = split(generate_dataset("D_sigma", 30, 2), 0.5, 2);
  ExperimentConfig cfg;
  cfg.seed = 2;
  cfg.map.restarts = 2;
  const EvalReport r = run_experiment({d}, {VariantFlags{}}, Inference::map, cfg);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].dataset == "D_sigma");
  CHECK(r.rows[0].variant == "GP");
  CHECK(r.rows[0].error.empty());
  CHECK(std::isfinite(r.rows[0].nlpd));

  std::ostringstream a;
  std::ostringstream b;
  write_report(a, r);
  write_report(b, run_experiment({d}, {VariantFlags{}}, Inference::map, cfg));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("dataset\tvariant\tinference\tseed\tmll\tmse\tnlpd\terror\n", 0) == 0);

  const EvalReport grid = run_experiment({d, d}, {VariantFlags{}, VariantFlags{true, false, false}},
                                         Inference::map, cfg);
  CHECK(grid.rows.size() == 4);
}

TEST_CASE("failed cells are recorded and the run continues") {
  Dataset unsplit = generate_dataset("D_sigma", 20, 1);
  unsplit.name = "unsplit";
  const Dataset ok = split(generate_dataset("D_sigma", 20, 1), 0.5, 1);
  ExperimentConfig cfg;
  cfg.map.restarts = 1;
  const EvalReport r = run_experiment({unsplit, ok}, {VariantFlags{}}, Inference::map, cfg);
  REQUIRE(r.rows.size() == 2);
  CHECK_FALSE(r.rows[0].error.empty());
  CHECK(r.rows[1].error.empty());
}

TEST_CASE("heteroscedastic variant beats the stationary GP on D_omega_ell") {
  const Dataset d = split(generate_dataset("D_omega_ell", 0, 1), 0.5, 1);
  ExperimentConfig cfg;
  cfg.seed = 1;
  const EvalReport r = run_experiment({d}, {VariantFlags{}, VariantFlags{true, false, true}},
                                      Inference::map, cfg);
  REQUIRE(r.rows.size() == 2);
  REQUIRE(r.rows[0].error.empty());
  REQUIRE(r.rows[1].error.empty());
  CHECK(r.rows[1].nlpd < r.rows[0].nlpd);
}

TEST_CASE("latent reconstruction error") {
  const Dataset d = generate_dataset("D_omega_sigma_ell", 40, 4);
  const std::vector<Index> at = all_indices(d.size());
  const VariantFlags flags{true, true, true};
  LatentState truth = LatentState::zeros(d.size(), flags, Frame::natural);
  for (Component c : kComponents) truth[c] = *d.log_truth(c, at);
  const LatentRmse zero = latent_reconstruction_error(truth, d, at);
  CHECK(zero.ell == 0.0);
  CHECK(zero.sigma == 0.0);
  CHECK(zero.omega == 0.0);

  LatentState shifted = truth;
  shifted[Component::omega].array() += 0.25;
  CHECK(latent_reconstruction_error(shifted, d, at).omega == doctest::Approx(0.25));

  const Dataset no_truth = make_dataset("plain", d.x, d.y);
  CHECK_THROWS_AS(latent_reconstruction_error(truth, no_truth, at), std::invalid_argument);
  CHECK_THROWS_AS(
      latent_reconstruction_error(LatentState::zeros(d.size(), flags, Frame::whitened), d, at),
      FrameError);
}

TEST_CASE("reconstruction curve reports one point per size") {
  const Dataset d = generate_dataset("D_omega_sigma_ell", 30, 4);
  ExperimentConfig cfg;
  cfg.seed = 4;
  cfg.map.restarts = 1;
  cfg.map.max_iters = 100;
  const auto curve = reconstruction_curve(d, {10, 20, 30}, VariantFlags{true, true, true}, cfg);
  REQUIRE(curve.size() == 3);
  CHECK(curve[0].size == 10);
  CHECK(curve[2].size == 30);
  for (const auto& p : curve) {
    CHECK(std::isfinite(p.rmse.ell));
    CHECK(std::isfinite(p.mll));
  }
  std::ostringstream a;
  std::ostringstream b;
  write_reconstruction(a, curve);
  write_reconstruction(b, reconstruction_curve(d, {10, 20, 30}, VariantFlags{true, true, true}, cfg));
  CHECK(a.str() == b.str());
}

}  // TEST_SUITE
