#pragma once

#include <filesystem>
#include <iosfwd>

#include "nsgp/config.hpp"
#include "nsgp/dataset.hpp"
#include "nsgp/experiment.hpp"

namespace nsgp {

// A fitted model as written by `nsgp fit`: configuration, normalization,
// the normalized training data and the latent draws (one for MAP).
struct FittedModel {
  RunConfig config;
  Inference inference = Inference::map;
  NormParams norm;
  Vector train_x;  // normalized
  Vector train_y;
  FitOutcome outcome;
};

void save_model(std::ostream& out, const FittedModel& model);
FittedModel load_model(std::istream& in);
FittedModel load_model(const std::filesystem::path& path);

}  // namespace nsgp
