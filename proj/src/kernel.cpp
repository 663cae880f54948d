#include "nsgp/kernel.hpp"

#include <cmath>
#include <string>

#include "nsgp/errors.hpp"

namespace nsgp::kernel {
namespace {

void require_positive(const Vector& v, const char* what) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      throw DomainError(std::string(what) + " must be finite and strictly positive");
    }
  }
}

void require_size(const Vector& v, Index n, const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + " has length " + std::to_string(v.size()) +
                         ", expected " + std::to_string(n));
  }
}

}  // namespace

Matrix DerivativePlusMatrix::dense() const {
  const Index n = row.size();
  Matrix out = Matrix::Zero(n, n);
  out.row(index) = row.transpose();
  out.col(index) = row;
  return out;
}

KernelMatrix nonstationary_kernel(const Vector& x_rows, const Vector& x_cols,
                                  const Vector& ell_rows, const Vector& ell_cols,
                                  const Vector& sigma_rows, const Vector& sigma_cols) {
  require_size(ell_rows, x_rows.size(), "row lengthscales");
  require_size(sigma_rows, x_rows.size(), "row signal values");
  require_size(ell_cols, x_cols.size(), "column lengthscales");
  require_size(sigma_cols, x_cols.size(), "column signal values");
  require_positive(ell_rows, "lengthscale");
  require_positive(ell_cols, "lengthscale");
  require_positive(sigma_rows, "signal value");
  require_positive(sigma_cols, "signal value");

  KernelMatrix out{Matrix(x_rows.size(), x_cols.size()), x_rows, x_cols};
  for (Index j = 0; j < x_cols.size(); ++j) {
    const double lj2 = ell_cols[j] * ell_cols[j];
    for (Index i = 0; i < x_rows.size(); ++i) {
      const double li2 = ell_rows[i] * ell_rows[i];
      const double sum = li2 + lj2;
      const double d = x_rows[i] - x_cols[j];
      out.entries(i, j) = sigma_rows[i] * sigma_cols[j] *
                          std::sqrt(2.0 * ell_rows[i] * ell_cols[j] / sum) *
                          std::exp(-d * d / sum);
    }
  }
  return out;
}

KernelMatrix nonstationary_kernel(const Vector& x, const Vector& ell, const Vector& sigma) {
  KernelMatrix out = nonstationary_kernel(x, x, ell, ell, sigma, sigma);
  // Exact symmetry; the loop above already agrees to rounding.
  out.entries = 0.5 * (out.entries + out.entries.transpose()).eval();
  return out;
}

KernelMatrix se_kernel(const Vector& x_rows, const Vector& x_cols, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw DomainError("se_kernel: alpha and beta must be strictly positive");
  }
  KernelMatrix out{Matrix(x_rows.size(), x_cols.size()), x_rows, x_cols};
  const double a2 = alpha * alpha;
  const double inv_2b2 = 1.0 / (2.0 * beta * beta);
  for (Index j = 0; j < x_cols.size(); ++j) {
    for (Index i = 0; i < x_rows.size(); ++i) {
      const double d = x_rows[i] - x_cols[j];
      out.entries(i, j) = a2 * std::exp(-d * d * inv_2b2);
    }
  }
  return out;
}

Matrix log_lengthscale_sensitivity(const Vector& x, const Vector& ell) {
  require_size(ell, x.size(), "lengthscales");
  require_positive(ell, "lengthscale");
  const Index n = x.size();
  Matrix out(n, n);
  for (Index j = 0; j < n; ++j) {
    const double lj2 = ell[j] * ell[j];
    for (Index i = 0; i < n; ++i) {
      const double li2 = ell[i] * ell[i];
      const double sum = li2 + lj2;
      const double d = x[i] - x[j];
      out(i, j) = (lj2 - li2) / (2.0 * sum) + 2.0 * d * d * li2 / (sum * sum);
    }
  }
  return out;
}

DerivativePlusMatrix dK_dlog_lengthscale(const Vector& x, const Vector& ell, const Vector& sigma,
                                         Index i) {
  if (i < 0 || i >= x.size()) {
    throw std::out_of_range("dK_dlog_lengthscale: index " + std::to_string(i) +
                            " outside [0, " + std::to_string(x.size()) + ")");
  }
  const Vector xi = x.segment(i, 1);
  const Vector li = ell.segment(i, 1);
  const Vector si = sigma.segment(i, 1);
  const Matrix k_row = nonstationary_kernel(xi, x, li, ell, si, sigma).entries;

  DerivativePlusMatrix out{i, Vector(x.size())};
  const double li2 = ell[i] * ell[i];
  for (Index j = 0; j < x.size(); ++j) {
    const double lj2 = ell[j] * ell[j];
    const double sum = li2 + lj2;
    const double d = x[i] - x[j];
    out.row[j] = k_row(0, j) * ((lj2 - li2) / (2.0 * sum) + 2.0 * d * d * li2 / (sum * sum));
  }
  return out;
}

}  // namespace nsgp::kernel
