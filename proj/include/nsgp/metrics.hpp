#pragma once

#include "nsgp/predict.hpp"
#include "nsgp/types.hpp"

namespace nsgp {

double mse(const Vector& y_test, const Vector& mean);

// -(1/n) sum_i log sum_k w_k N(y_i | m_ki, C_k(i,i) + noise_ki).
double nlpd(const Vector& y_test, const PredictiveMixture& mix);

}  // namespace nsgp
