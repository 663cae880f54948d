#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nsgp/types.hpp"

namespace nsgp {

// norm = (raw - offset) / scale. Inputs map to [0, 1], outputs to [-1, 1].
struct NormParams {
  double x_offset = 0.0;
  double x_scale = 1.0;
  double y_offset = 0.0;
  double y_scale = 1.0;

  static NormParams fit(const Vector& x, const Vector& y);

  Vector normalize_x(const Vector& x) const;
  Vector normalize_y(const Vector& y) const;
  Vector denormalize_x(const Vector& x) const;
  Vector denormalize_y(const Vector& y) const;
};

// Generating latent functions tabulated at the dataset inputs, raw units
// (l, s, w themselves, not their logs). Absent components are unknown.
struct Truth {
  std::optional<Vector> ell;
  std::optional<Vector> sigma;
  std::optional<Vector> omega;

  const std::optional<Vector>& operator[](Component c) const;
};

struct Dataset {
  std::string name;
  Vector x;
  Vector y;
  Vector x_norm;
  Vector y_norm;
  NormParams norm;
  std::vector<Index> train;  // sorted
  std::vector<Index> test;   // sorted
  std::optional<Truth> truth;

  Index size() const { return x.size(); }

  Vector train_x() const;  // normalized
  Vector train_y() const;
  Vector test_x() const;
  Vector test_y() const;

  // Log of the generating latent at the given indices, in normalized units.
  std::optional<Vector> log_truth(Component c, const std::vector<Index>& at) const;
};

// Builds a dataset from raw vectors: normalizes, puts every point in train.
Dataset make_dataset(std::string name, Vector x, Vector y, std::optional<Truth> truth = {});

// Synthetic families: D_sigma, D_ell, D_omega_sigma, D_omega_ell,
// D_omega_sigma_ell, J_like. n <= 0 picks the family's standard size.
std::vector<std::string> dataset_names();
Index default_size(std::string_view name);
Dataset generate_dataset(std::string_view name, Index n, std::uint64_t seed);

// Header "x,y"; optionally followed by truth columns "ell,sigma,omega".
Dataset load_csv(std::istream& in, std::string name = "csv");
Dataset load_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const Dataset& data);

// Uniform split without replacement; ceil(fraction * n) training points.
Dataset split(Dataset data, double fraction, std::uint64_t seed);

}  // namespace nsgp
