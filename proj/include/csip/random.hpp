#pragma once

// Seeded sampling. Every trial draws from its own stream, keyed by
// (seed, tag, index), so results do not depend on execution order.

#include <cstdint>
#include <random>
#include <string_view>

#include "csip/module.hpp"

namespace csip {

class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, std::string_view tag, std::uint64_t index);

  Real normal() { return normal_(engine_); }
  Real uniform() { return uniform_(engine_); }
  /// Standard complex Gaussian, E|z|^2 = 1.
  Complex complex_normal();
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<Real> normal_{0.0, 1.0};
  std::uniform_real_distribution<Real> uniform_{0.0, 1.0};
};

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index);

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);
Matrix random_unitary(Rng& rng, Eigen::Index n);

AlgebraElement random_algebra_element(Rng& rng, const AlgebraElement::DescriptorPtr& algebra);
AlgebraElement random_self_adjoint(Rng& rng, const AlgebraElement::DescriptorPtr& algebra);
ModuleElement random_module_element(Rng& rng, const ModuleElement::DescriptorPtr& module);

/// Pair (x, y) with [x, y] self-adjoint: real coordinates on bundles,
/// y = x (x*x)^{-1} h with h Hermitian on matrix modules.
std::pair<ModuleElement, ModuleElement> random_self_adjoint_pair(Rng& rng, const ModuleElement::DescriptorPtr& module);

}  // namespace csip
