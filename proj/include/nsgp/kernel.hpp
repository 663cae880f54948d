#pragma once

#include "nsgp/types.hpp"

// Covariance functions of the model.
//
// nonstationary_kernel evaluates the Gibbs-type generalisation of the squared
// exponential in one input dimension,
//
//   k(x, x') = s s' sqrt(2 l l' / (l^2 + l'^2)) exp(-(x - x')^2 / (l^2 + l'^2)),
//
// where s, l are the signal and lengthscale values at x and s', l' at x'.
// se_kernel is the stationary squared exponential used for the latent priors.
namespace nsgp::kernel {

struct KernelMatrix {
  Matrix entries;
  Vector row_inputs;
  Vector col_inputs;
};

// Derivative of the square data covariance with respect to one log-lengthscale
// entry. Only row/column `index` are nonzero; `row` holds that row (the
// diagonal entry is zero since k(x, x) = s^2 does not depend on l).
struct DerivativePlusMatrix {
  Index index = 0;
  Vector row;

  Matrix dense() const;
};

KernelMatrix nonstationary_kernel(const Vector& x_rows, const Vector& x_cols,
                                  const Vector& ell_rows, const Vector& ell_cols,
                                  const Vector& sigma_rows, const Vector& sigma_cols);

// Square case over a single input vector.
KernelMatrix nonstationary_kernel(const Vector& x, const Vector& ell, const Vector& sigma);

KernelMatrix se_kernel(const Vector& x_rows, const Vector& x_cols, double alpha, double beta);

// D(i, j) = d log k(x_i, x_j) / d log l_i, so that K .* D has the plus-matrix
// rows of dK_dlog_lengthscale as its rows:
//
//   D(i, j) = (l_j^2 - l_i^2) / (2 L) + 2 d^2 l_i^2 / L^2,   L = l_i^2 + l_j^2.
Matrix log_lengthscale_sensitivity(const Vector& x, const Vector& ell);

DerivativePlusMatrix dK_dlog_lengthscale(const Vector& x, const Vector& ell, const Vector& sigma,
                                         Index i);

}  // namespace nsgp::kernel
