#pragma once

// Finite-dimensional C*-algebras: functions on a finite set, square complex
// matrices, and finite direct sums of those.
//
// An element stores its payload as a flat list of dense blocks, one per leaf
// of the descriptor tree. A Functions(m) leaf is an m x 1 column, a
// Matrices(n) leaf is an n x n matrix. All arithmetic is blockwise.

#include <memory>
#include <vector>

#include "csip/types.hpp"

namespace csip {

struct AlgebraAccess;

class AlgebraDescriptor {
 public:
  enum class Kind { functions, matrices, direct_sum };

  struct Leaf {
    Kind kind;  // functions or matrices
    int size;
    bool operator==(const Leaf&) const = default;
  };

  static AlgebraDescriptor functions(int m);
  static AlgebraDescriptor matrices(int n);
  static AlgebraDescriptor direct_sum(std::vector<AlgebraDescriptor> parts);

  Kind kind() const { return kind_; }
  int size() const { return size_; }
  const std::vector<AlgebraDescriptor>& parts() const { return parts_; }
  const std::vector<Leaf>& leaves() const { return leaves_; }

  bool is_commutative() const;
  /// Real dimension of the self-adjoint part.
  int self_adjoint_dimension() const;

  bool operator==(const AlgebraDescriptor& other) const {
    return kind_ == other.kind_ && size_ == other.size_ && parts_ == other.parts_;
  }

 private:
  AlgebraDescriptor(Kind kind, int size, std::vector<AlgebraDescriptor> parts);

  Kind kind_;
  int size_;
  std::vector<AlgebraDescriptor> parts_;
  std::vector<Leaf> leaves_;
};

class AlgebraElement {
 public:
  using DescriptorPtr = std::shared_ptr<const AlgebraDescriptor>;

  AlgebraElement(const AlgebraDescriptor& descriptor, std::vector<Matrix> blocks);
  AlgebraElement(DescriptorPtr descriptor, std::vector<Matrix> blocks);

  static AlgebraElement zero(const AlgebraDescriptor& descriptor);
  static AlgebraElement one(const AlgebraDescriptor& descriptor);
  static AlgebraElement zero(DescriptorPtr descriptor);
  static AlgebraElement one(DescriptorPtr descriptor);

  const AlgebraDescriptor& descriptor() const { return *descriptor_; }
  const DescriptorPtr& descriptor_ptr() const { return descriptor_; }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(std::size_t i) const { return blocks_[i]; }

  bool same_algebra(const AlgebraElement& other) const {
    return descriptor_ == other.descriptor_ || *descriptor_ == *other.descriptor_;
  }

 private:
  struct Unchecked {};
  AlgebraElement(DescriptorPtr descriptor, std::vector<Matrix> blocks, Unchecked)
      : descriptor_(std::move(descriptor)), blocks_(std::move(blocks)) {}

  DescriptorPtr descriptor_;
  std::vector<Matrix> blocks_;

  friend struct AlgebraAccess;
};

/// Internal: builds elements without re-validating block shapes.
struct AlgebraAccess {
  static AlgebraElement make(AlgebraElement::DescriptorPtr descriptor, std::vector<Matrix> blocks) {
    return AlgebraElement(std::move(descriptor), std::move(blocks), AlgebraElement::Unchecked{});
  }
};

AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement sub(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement star(const AlgebraElement& a);
AlgebraElement scalar_mul(Complex lambda, const AlgebraElement& a);

inline AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) { return add(a, b); }
inline AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) { return sub(a, b); }
inline AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) { return mul(a, b); }
inline AlgebraElement operator*(Complex lambda, const AlgebraElement& a) { return scalar_mul(lambda, a); }

/// Max modulus for functions, largest singular value for matrices, max over
/// the blocks of a direct sum.
Real cstar_norm(const AlgebraElement& a);

bool is_self_adjoint(const AlgebraElement& a, const NumericPolicy& policy = {});
AlgebraElement re(const AlgebraElement& a);

/// Smallest spectrum point of re(a) over all blocks.
Real min_spectrum(const AlgebraElement& a);
/// Signed positivity slack: min_spectrum(a) / (1 + ||a||).
Real positivity_margin(const AlgebraElement& a);

bool is_positive(const AlgebraElement& a, const NumericPolicy& policy = {});
/// a <= b in the order induced by the positive cone.
bool leq(const AlgebraElement& a, const AlgebraElement& b, const NumericPolicy& policy = {});

/// Positive square root, computed spectrally with negative round-off clipped.
AlgebraElement sqrt_positive(const AlgebraElement& a, const NumericPolicy& policy = {});
/// |a| = (a* a)^{1/2}
AlgebraElement abs_value(const AlgebraElement& a, const NumericPolicy& policy = {});
/// (a + eps 1)^{-1/2} for positive a.
AlgebraElement regularized_inv_sqrt(const AlgebraElement& a, Real eps, const NumericPolicy& policy = {});

bool cube_norm_identity_check(const AlgebraElement& a, const NumericPolicy& policy = {});

/// Least K >= 0 with K a - b >= 0, for a positive and invertible. Infinite if
/// some direction has a = 0 but b > 0.
Real generalized_max_ratio(const AlgebraElement& b, const AlgebraElement& a);

/// Coordinates of re(a) in a real basis of the self-adjoint part.
Eigen::VectorXd self_adjoint_coordinates(const AlgebraElement& a);

}  // namespace csip
