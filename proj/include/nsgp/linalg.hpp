#pragma once

#include <Eigen/Cholesky>

#include "nsgp/types.hpp"

namespace nsgp::linalg {

enum class JitterPolicy {
  always,      // start at the base jitter
  on_failure,  // try the bare matrix first
};

// Relative jitter ladder: base * mean(diag), multiplied by `growth` per retry.
inline constexpr double kBaseJitter = 1e-8;
inline constexpr double kMaxJitter = 1e-2;
inline constexpr double kJitterGrowth = 10.0;

struct Cholesky {
  Eigen::LLT<Matrix> llt;
  double jitter = 0.0;  // absolute amount added to the diagonal

  Matrix lower() const { return llt.matrixL(); }
  double log_det() const;
  Vector solve(const Vector& b) const { return llt.solve(b); }
  Matrix solve(const Matrix& b) const { return llt.solve(b); }
};

// Cholesky of a symmetric matrix with jitter escalation. Throws NumericalError
// once the ladder is exhausted.
Cholesky jittered_cholesky(const Matrix& k, JitterPolicy policy = JitterPolicy::always);

// One draw from N(mean, L L^T) given the lower factor and a standard-normal vector.
inline Vector correlate(const Vector& mean, const Matrix& lower, const Vector& z) {
  return mean + lower.triangularView<Eigen::Lower>() * z;
}

}  // namespace nsgp::linalg
