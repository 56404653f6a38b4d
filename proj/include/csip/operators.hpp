#pragma once

// Bounded A-linear operators between C*-s.i.p. modules.
//
//   fibered   per-point matrices T_t : X_t -> Y_t between bundles (or between
//             transports of bundles along the same automorphism)
//   leftmult  x -> c x on matrix_self(n) or a transport of it
//   dual      f_y(x) = [y, x], valued in the algebra A viewed as a module over
//             itself with [b, c] = b* c
//   mixing    negative control only: moves payload between blocks (or
//             multiplies matrix blocks on the right), which breaks A-linearity

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "json.hpp"

#include "csip/module.hpp"
#include "csip/report.hpp"

namespace csip {

class ModuleOperator {
 public:
  enum class Kind { fibered, leftmult, dual, mixing };

  static ModuleOperator fibered(ModuleDescriptor domain, ModuleDescriptor codomain, std::vector<Matrix> blocks);
  static ModuleOperator leftmult(Matrix c);
  static ModuleOperator leftmult(ModuleDescriptor domain, Matrix c);
  static ModuleOperator dual(ModuleElement y);
  static ModuleOperator mixing(ModuleDescriptor domain);

  Kind kind() const { return kind_; }
  const ModuleDescriptor& domain() const { return *domain_; }
  const ModuleElement::DescriptorPtr& domain_ptr() const { return domain_; }
  /// Codomain module; null for dual functionals, whose values live in the algebra.
  const ModuleElement::DescriptorPtr& codomain_ptr() const { return codomain_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& c() const { return blocks_.front(); }
  const ModuleElement& y() const { return *y_; }
  /// mixing: source block of each output block.
  const std::vector<int>& shift() const { return shift_; }

  /// True when the closed-form norm applies: dual, leftmult, and fibered maps
  /// between Hilbert-fiber bundles.
  bool has_exact_norm() const;

 private:
  ModuleOperator() = default;

  Kind kind_ = Kind::fibered;
  ModuleElement::DescriptorPtr domain_;
  ModuleElement::DescriptorPtr codomain_;
  std::vector<Matrix> blocks_;
  std::optional<ModuleElement> y_;
  std::vector<int> shift_;
};

using OperatorValue = std::variant<ModuleElement, AlgebraElement>;

OperatorValue apply(const ModuleOperator& t, const ModuleElement& x);
/// [Tx, Tx] in the codomain.
AlgebraElement image_csip(const ModuleOperator& t, const ModuleElement& x);
/// |||Tx||| in the codomain.
Real image_norm(const ModuleOperator& t, const ModuleElement& x);

/// T(x a) = T(x) a on seeded samples.
VerificationReport check_A_linear(const ModuleOperator& t, int sample_count, std::uint64_t seed,
                                  const NumericPolicy& policy = {});

struct BoundReport {
  Real op_norm_lb = 0;
  std::optional<Real> op_norm_exact;
  Real k_min_est = 0;
  /// Whether [Tx,Tx] <= k_min_est (1 + tol_pos) [x,x] held on fresh samples.
  bool k_validated = false;
  std::optional<ModuleElement> witness;
};

/// Sampled lower bound on ||T|| refined by ascent (power iteration on Hilbert
/// fibers and matrix blocks, hill climbing otherwise), the analytic witness
/// y/|||y||| for dual functionals, and the closed form where one exists.
/// k_min_est is filled as in min_K.
BoundReport op_norm(const ModuleOperator& t, int sample_count, std::uint64_t seed, const NumericPolicy& policy = {});

/// Estimate of the least K with [Tx,Tx] <= K [x,x]: the largest pointwise
/// ratio over seeded samples and ascent candidates. Exact for fibered maps
/// between Hilbert fibers, for leftmult, and for dual functionals (witness x = y).
BoundReport min_K(const ModuleOperator& t, int sample_count, std::uint64_t seed, const NumericPolicy& policy = {});

/// x ([x,x] + 1/n)^{-1/2}
ModuleElement regularized_normalize(const ModuleElement& x, int n, const NumericPolicy& policy = {});

/// r(a) = [y, T(x a)] against r(1) a, plus the chain
/// r(a)* r(a) <= |||y|||^2 [T(xa), T(xa)] <= |||y|||^2 K a*[x,x]a <= |||y|||^2 K |||x|||^2 a* a
/// with K = ||T||^2 (closed form when available, else the validated estimate).
/// y lives in the codomain: a module element, or an algebra element for dual
/// functionals (pass it wrapped in OperatorValue).
VerificationReport johnson_property_check(const ModuleOperator& t, const OperatorValue& y, int sample_count,
                                          std::uint64_t seed, const NumericPolicy& policy = {});

/// Operators suite for one construction: a dual functional, plus a random
/// fibered map (bundles) or left multiplication (matrix modules). With
/// inject_mixing the structural operator is replaced by the mixing control.
std::vector<VerificationReport> verify_operators(const ModuleDescriptor& desc, int sample_count, std::uint64_t seed,
                                                 const NumericPolicy& policy = {}, bool inject_mixing = false);

nlohmann::json to_json(const ModuleOperator& t);
ModuleOperator operator_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BoundReport& r);

}  // namespace csip
