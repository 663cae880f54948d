#include "nsgp/linalg.hpp"

#include <cmath>
#include <sstream>

#include "nsgp/errors.hpp"

namespace nsgp::linalg {

double Cholesky::log_det() const {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Cholesky jittered_cholesky(const Matrix& k, JitterPolicy policy) {
  if (k.rows() != k.cols()) {
    throw DimensionError("jittered_cholesky: matrix is not square");
  }
  if (!k.allFinite()) {
    throw NumericalError("jittered_cholesky: non-finite matrix entries");
  }
  const Index n = k.rows();
  const double mean_diag = n > 0 ? k.diagonal().mean() : 1.0;
  const double scale = mean_diag > 0.0 ? mean_diag : 1.0;

  Cholesky out;
  if (policy == JitterPolicy::on_failure) {
    out.llt.compute(k);
    if (out.llt.info() == Eigen::Success) {
      out.jitter = 0.0;
      return out;
    }
  }
  // Multiplying by 10 from 1e-8 lands on 1e-2 after six steps; the small
  // tolerance absorbs the floating-point drift of repeated products.
  for (double rel = kBaseJitter; rel <= kMaxJitter * (1.0 + 1e-9); rel *= kJitterGrowth) {
    const double jitter = rel * scale;
    Matrix kj = k;
    kj.diagonal().array() += jitter;
    out.llt.compute(kj);
    if (out.llt.info() == Eigen::Success) {
      out.jitter = jitter;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "Cholesky factorization failed (n=" << n << ") after jitter up to " << kMaxJitter
      << " x mean diagonal";
  throw NumericalError(msg.str());
}

}  // namespace nsgp::linalg
