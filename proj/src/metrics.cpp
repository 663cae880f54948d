#include "nsgp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nsgp/errors.hpp"

namespace nsgp {

double mse(const Vector& y_test, const Vector& mean) {
  if (y_test.size() != mean.size()) throw DimensionError("mse: length mismatch");
  if (y_test.size() == 0) throw DimensionError("mse: no test points");
  return (y_test - mean).squaredNorm() / static_cast<double>(y_test.size());
}

double nlpd(const Vector& y_test, const PredictiveMixture& mix) {
  if (mix.components.empty()) throw std::invalid_argument("nlpd: empty mixture");
  if (y_test.size() == 0) throw DimensionError("nlpd: no test points");
  for (const auto& c : mix.components) {
    if (c.mean.size() != y_test.size() || c.noise_var.size() != y_test.size()) {
      throw DimensionError("nlpd: length mismatch");
    }
  }
  constexpr double kLog2Pi = 1.8378770664093454836;
  const double log_w = std::log(mix.weight());
  std::vector<double> terms(mix.components.size());
  double total = 0.0;
  for (Index i = 0; i < y_test.size(); ++i) {
    double max_term = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < mix.components.size(); ++k) {
      const GaussianComponent& c = mix.components[k];
      const double var = std::max(c.cov(i, i), 0.0) + c.noise_var[i];
      const double r = y_test[i] - c.mean[i];
      terms[k] = log_w - 0.5 * (kLog2Pi + std::log(var) + r * r / var);
      max_term = std::max(max_term, terms[k]);
    }
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - max_term);
    total += max_term + std::log(sum);
  }
  return -total / static_cast<double>(y_test.size());
}

}  // namespace nsgp
