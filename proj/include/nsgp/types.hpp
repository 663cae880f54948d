#pragma once

#include <array>
#include <string_view>

#include <Eigen/Dense>

namespace nsgp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// The three log-latent functions of the model.
enum class Component { ell, sigma, omega };

inline constexpr std::array<Component, 3> kComponents{Component::ell, Component::sigma,
                                                      Component::omega};

constexpr std::size_t index_of(Component c) { return static_cast<std::size_t>(c); }

constexpr std::string_view name_of(Component c) {
  switch (c) {
    case Component::ell: return "ell";
    case Component::sigma: return "sigma";
    case Component::omega: return "omega";
  }
  return "?";
}

}  // namespace nsgp
