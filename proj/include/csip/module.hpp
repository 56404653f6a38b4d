#pragma once

// C*-semi-inner-product modules.
//
//   bundle       sections over a finite set, one classical s.i.p. space per
//                point, over the algebra of functions on that set
//   matrix_self  n x n matrices as a right module over themselves, [x,y] = x* y
//   direct_sum   tuples of modules over the direct sum of their algebras
//   transported  a module carried along a *-automorphism psi of its algebra:
//                [x,y]_B = psi([x,y]_A), x.b = x.psi^{-1}(b)
//
// Elements store a flat list of dense blocks: one d_t x 1 column per bundle
// point, one n x n block per matrix_self, concatenated for direct sums.
// Transported elements share the payload layout of their base.

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "csip/algebra.hpp"
#include "csip/sip_classical.hpp"

namespace csip {

/// Negative-control corruptions used to check that the verifiers detect them.
enum class FaultMode { none, sign_flip, broken_action, fiber_mixing, non_isometric_psi };

/// *-automorphism of a finite-dimensional algebra. A permutation acts on every
/// Functions(m) leaf with m equal to its length; a unitary u acts as a -> u a u*
/// on every Matrices(n) leaf with n equal to its size. Other leaves are fixed.
class IsoDescriptor {
 public:
  enum class Kind { permute, unitary };

  static IsoDescriptor permute(std::vector<int> permutation);
  static IsoDescriptor unitary(Matrix u, const NumericPolicy& policy = {});

  Kind kind() const { return kind_; }
  const std::vector<int>& permutation() const { return perm_; }
  const Matrix& unitary_matrix() const { return u_; }

  bool acts_on(const AlgebraDescriptor& algebra) const;
  AlgebraElement apply(const AlgebraElement& a) const;
  AlgebraElement apply_inverse(const AlgebraElement& a) const;

  bool operator==(const IsoDescriptor& other) const;

 private:
  IsoDescriptor(Kind kind, std::vector<int> perm, Matrix u) : kind_(kind), perm_(std::move(perm)), u_(std::move(u)) {}
  AlgebraElement map(const AlgebraElement& a, bool inverse) const;

  Kind kind_;
  std::vector<int> perm_;
  Matrix u_;
};

class ModuleDescriptor {
 public:
  enum class Kind { bundle, matrix_self, direct_sum, transported };

  static ModuleDescriptor bundle(std::vector<SipSpace> fibers);
  static ModuleDescriptor matrix_self(int n);
  static ModuleDescriptor direct_sum(std::vector<ModuleDescriptor> parts);
  static ModuleDescriptor transported(ModuleDescriptor base, IsoDescriptor iso);

  Kind kind() const { return kind_; }
  const std::vector<SipSpace>& fibers() const { return fibers_; }
  /// Matrix size for matrix_self.
  int size() const { return n_; }
  /// Direct-sum parts; for transported, the single base module.
  const std::vector<ModuleDescriptor>& parts() const { return parts_; }
  const ModuleDescriptor& base() const { return parts_.front(); }
  const IsoDescriptor& iso() const { return isos_.front(); }

  FaultMode fault() const { return fault_; }
  ModuleDescriptor with_fault(FaultMode fault) const;

  const AlgebraDescriptor& algebra() const { return *algebra_; }
  const AlgebraElement::DescriptorPtr& algebra_ptr() const { return algebra_; }

  int block_count() const { return block_count_; }
  /// Expected shape of payload block i.
  std::pair<int, int> block_shape(int i) const;

  /// True when every fiber is a Hilbert space, i.e. a Hilbert C*-module.
  bool is_hilbert() const;
  std::string label() const;

  bool operator==(const ModuleDescriptor& other) const;

 private:
  ModuleDescriptor() = default;
  void finish();

  Kind kind_ = Kind::bundle;
  std::vector<SipSpace> fibers_;
  int n_ = 0;
  std::vector<ModuleDescriptor> parts_;
  std::vector<IsoDescriptor> isos_;
  FaultMode fault_ = FaultMode::none;
  AlgebraElement::DescriptorPtr algebra_;
  std::vector<std::pair<int, int>> shapes_;
  int block_count_ = 0;
};

class ModuleElement {
 public:
  using DescriptorPtr = std::shared_ptr<const ModuleDescriptor>;

  ModuleElement(const ModuleDescriptor& descriptor, std::vector<Matrix> blocks);
  ModuleElement(DescriptorPtr descriptor, std::vector<Matrix> blocks);

  static ModuleElement zero(DescriptorPtr descriptor);
  static ModuleElement zero(const ModuleDescriptor& descriptor);

  const ModuleDescriptor& descriptor() const { return *descriptor_; }
  const DescriptorPtr& descriptor_ptr() const { return descriptor_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(std::size_t i) const { return blocks_[i]; }

  bool same_module(const ModuleElement& other) const {
    return descriptor_ == other.descriptor_ || *descriptor_ == *other.descriptor_;
  }
  bool is_zero() const;

 private:
  DescriptorPtr descriptor_;
  std::vector<Matrix> blocks_;
};

ModuleElement add(const ModuleElement& x, const ModuleElement& y);
ModuleElement sub(const ModuleElement& x, const ModuleElement& y);
ModuleElement scalar_mul(Complex lambda, const ModuleElement& x);
/// x + alpha y
ModuleElement axpy(const ModuleElement& x, Complex alpha, const ModuleElement& y);

inline ModuleElement operator+(const ModuleElement& x, const ModuleElement& y) { return add(x, y); }
inline ModuleElement operator-(const ModuleElement& x, const ModuleElement& y) { return sub(x, y); }
inline ModuleElement operator*(Complex lambda, const ModuleElement& x) { return scalar_mul(lambda, x); }

/// The algebra-valued semi-inner product [x, y].
AlgebraElement csip(const ModuleElement& x, const ModuleElement& y);
/// Right module action x.a
ModuleElement module_action(const ModuleElement& x, const AlgebraElement& a);

/// |||x||| = ||[x, x]||^{1/2}
Real triple_norm(const ModuleElement& x);
/// rho(x) = [x, x]^{1/2}
AlgebraElement rho(const ModuleElement& x, const NumericPolicy& policy = {});
/// ||[x, y] - [y, x]*||
Real hermitian_defect(const ModuleElement& x, const ModuleElement& y);

/// Real rank of the span of the given self-adjoint values, thresholded at
/// tol * (largest singular value).
int self_adjoint_span_rank(std::span<const AlgebraElement> values, Real tol);
/// True when the values span the self-adjoint part of their algebra.
bool spans_algebra(std::span<const AlgebraElement> values, const NumericPolicy& policy = {});

}  // namespace csip
