#include "csip/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "csip/spectral.hpp"

namespace csip {

namespace {

using Kind = AlgebraDescriptor::Kind;

void require_same(const AlgebraElement& a, const AlgebraElement& b, const char* op) {
  if (!a.same_algebra(b))
    throw StructuralError(std::string(op) + ": operands belong to different algebras");
}

template <typename F>
AlgebraElement map_leaves(const AlgebraElement& a, F&& f) {
  const auto& leaves = a.descriptor().leaves();
  std::vector<Matrix> out;
  out.reserve(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) out.push_back(f(leaves[i], a.block(i)));
  return AlgebraAccess::make(a.descriptor_ptr(), std::move(out));
}

template <typename F>
AlgebraElement zip_leaves(const AlgebraElement& a, const AlgebraElement& b, F&& f) {
  const auto& leaves = a.descriptor().leaves();
  std::vector<Matrix> out;
  out.reserve(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) out.push_back(f(leaves[i], a.block(i), b.block(i)));
  return AlgebraAccess::make(a.descriptor_ptr(), std::move(out));
}

Real leaf_norm(const AlgebraDescriptor::Leaf& leaf, const Matrix& block) {
  if (leaf.kind == Kind::functions) return block.size() ? block.cwiseAbs().maxCoeff() : 0.0;
  return spectral::operator_norm(block);
}

Real leaf_min_spectrum(const AlgebraDescriptor::Leaf& leaf, const Matrix& block) {
  if (leaf.kind == Kind::functions) return block.real().minCoeff();
  return spectral::min_eigenvalue(block);
}

// Applies f to the (real) spectrum of the Hermitian part of a leaf.
template <typename F>
Matrix leaf_function(const AlgebraDescriptor::Leaf& leaf, const Matrix& block, F&& f) {
  if (leaf.kind == Kind::functions) {
    Matrix out(block.rows(), 1);
    for (Eigen::Index i = 0; i < block.rows(); ++i) out(i, 0) = Complex(f(block(i, 0).real()), 0.0);
    return out;
  }
  return spectral::apply(block, [&](Real lambda) { return f(lambda); });
}

Matrix make_leaf(const AlgebraDescriptor::Leaf& leaf, bool identity) {
  if (leaf.kind == Kind::functions)
    return identity ? Matrix(Matrix::Ones(leaf.size, 1)) : Matrix(Matrix::Zero(leaf.size, 1));
  return identity ? Matrix(Matrix::Identity(leaf.size, leaf.size)) : Matrix(Matrix::Zero(leaf.size, leaf.size));
}

}  // namespace

AlgebraDescriptor::AlgebraDescriptor(Kind kind, int size, std::vector<AlgebraDescriptor> parts)
    : kind_(kind), size_(size), parts_(std::move(parts)) {
  if (kind_ == Kind::direct_sum) {
    if (parts_.empty()) throw StructuralError("direct sum needs at least one part");
    for (const auto& p : parts_) leaves_.insert(leaves_.end(), p.leaves_.begin(), p.leaves_.end());
  } else {
    if (size_ < 1) throw StructuralError("algebra size must be at least 1");
    leaves_.push_back({kind_, size_});
  }
}

AlgebraDescriptor AlgebraDescriptor::functions(int m) { return {Kind::functions, m, {}}; }
AlgebraDescriptor AlgebraDescriptor::matrices(int n) { return {Kind::matrices, n, {}}; }
AlgebraDescriptor AlgebraDescriptor::direct_sum(std::vector<AlgebraDescriptor> parts) {
  return {Kind::direct_sum, 0, std::move(parts)};
}

bool AlgebraDescriptor::is_commutative() const {
  return std::all_of(leaves_.begin(), leaves_.end(),
                     [](const Leaf& l) { return l.kind == Kind::functions || l.size == 1; });
}

int AlgebraDescriptor::self_adjoint_dimension() const {
  int dim = 0;
  for (const auto& l : leaves_) dim += l.kind == Kind::functions ? l.size : l.size * l.size;
  return dim;
}

AlgebraElement::AlgebraElement(const AlgebraDescriptor& descriptor, std::vector<Matrix> blocks)
    : AlgebraElement(std::make_shared<const AlgebraDescriptor>(descriptor), std::move(blocks)) {}

AlgebraElement::AlgebraElement(DescriptorPtr descriptor, std::vector<Matrix> blocks)
    : descriptor_(std::move(descriptor)), blocks_(std::move(blocks)) {
  const auto& leaves = descriptor_->leaves();
  if (blocks_.size() != leaves.size())
    throw StructuralError("algebra element has " + std::to_string(blocks_.size()) + " blocks, descriptor has " +
                          std::to_string(leaves.size()) + " leaves");
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const auto& l = leaves[i];
    const auto cols = l.kind == Kind::functions ? 1 : l.size;
    if (blocks_[i].rows() != l.size || blocks_[i].cols() != cols)
      throw StructuralError("algebra element block " + std::to_string(i) + " has the wrong shape");
    if (!blocks_[i].allFinite()) throw StructuralError("algebra element has non-finite entries");
  }
}

AlgebraElement AlgebraElement::zero(const AlgebraDescriptor& d) {
  return zero(std::make_shared<const AlgebraDescriptor>(d));
}
AlgebraElement AlgebraElement::one(const AlgebraDescriptor& d) {
  return one(std::make_shared<const AlgebraDescriptor>(d));
}

AlgebraElement AlgebraElement::zero(DescriptorPtr d) {
  std::vector<Matrix> blocks;
  for (const auto& l : d->leaves()) blocks.push_back(make_leaf(l, false));
  return {std::move(d), std::move(blocks), Unchecked{}};
}

AlgebraElement AlgebraElement::one(DescriptorPtr d) {
  std::vector<Matrix> blocks;
  for (const auto& l : d->leaves()) blocks.push_back(make_leaf(l, true));
  return {std::move(d), std::move(blocks), Unchecked{}};
}

AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b) {
  require_same(a, b, "add");
  return zip_leaves(a, b, [](const auto&, const Matrix& x, const Matrix& y) -> Matrix { return x + y; });
}

AlgebraElement sub(const AlgebraElement& a, const AlgebraElement& b) {
  require_same(a, b, "sub");
  return zip_leaves(a, b, [](const auto&, const Matrix& x, const Matrix& y) -> Matrix { return x - y; });
}

AlgebraElement mul(const AlgebraElement& a, const AlgebraElement& b) {
  require_same(a, b, "mul");
  return zip_leaves(a, b, [](const AlgebraDescriptor::Leaf& l, const Matrix& x, const Matrix& y) -> Matrix {
    if (l.kind == Kind::functions) return x.cwiseProduct(y);
    return x * y;
  });
}

AlgebraElement star(const AlgebraElement& a) {
  return map_leaves(a, [](const AlgebraDescriptor::Leaf& l, const Matrix& x) -> Matrix {
    if (l.kind == Kind::functions) return x.conjugate();
    return x.adjoint();
  });
}

AlgebraElement scalar_mul(Complex lambda, const AlgebraElement& a) {
  return map_leaves(a, [lambda](const auto&, const Matrix& x) -> Matrix { return lambda * x; });
}

Real cstar_norm(const AlgebraElement& a) {
  const auto& leaves = a.descriptor().leaves();
  Real norm = 0;
  for (std::size_t i = 0; i < leaves.size(); ++i) norm = std::max(norm, leaf_norm(leaves[i], a.block(i)));
  return norm;
}

bool is_self_adjoint(const AlgebraElement& a, const NumericPolicy& policy) {
  Real defect = 0;
  const auto& leaves = a.descriptor().leaves();
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const Matrix& x = a.block(i);
    if (leaves[i].kind == Kind::functions)
      defect = std::max(defect, 2 * (x.size() ? x.imag().cwiseAbs().maxCoeff() : 0.0));
    else
      defect = std::max(defect, spectral::operator_norm(Matrix(x - x.adjoint())));
  }
  return defect <= policy.tol_eq * (1 + cstar_norm(a));
}

AlgebraElement re(const AlgebraElement& a) {
  return map_leaves(a, [](const AlgebraDescriptor::Leaf& l, const Matrix& x) -> Matrix {
    if (l.kind == Kind::functions) return x.real().cast<Complex>();
    return spectral::hermitian_part(x);
  });
}

Real min_spectrum(const AlgebraElement& a) {
  const auto& leaves = a.descriptor().leaves();
  Real lo = std::numeric_limits<Real>::infinity();
  for (std::size_t i = 0; i < leaves.size(); ++i) lo = std::min(lo, leaf_min_spectrum(leaves[i], a.block(i)));
  return lo;
}

Real positivity_margin(const AlgebraElement& a) { return min_spectrum(a) / (1 + cstar_norm(a)); }

bool is_positive(const AlgebraElement& a, const NumericPolicy& policy) {
  if (!is_self_adjoint(a, policy)) return false;
  return min_spectrum(a) >= -policy.tol_pos * (1 + cstar_norm(a));
}

bool leq(const AlgebraElement& a, const AlgebraElement& b, const NumericPolicy& policy) {
  require_same(a, b, "leq");
  return is_positive(sub(b, a), policy);
}

AlgebraElement sqrt_positive(const AlgebraElement& a, const NumericPolicy& policy) {
  if (!is_positive(a, policy)) throw DomainError("sqrt_positive: element is not positive");
  return map_leaves(a, [](const AlgebraDescriptor::Leaf& l, const Matrix& x) {
    return leaf_function(l, x, [](Real lambda) { return std::sqrt(std::max(lambda, 0.0)); });
  });
}

AlgebraElement abs_value(const AlgebraElement& a, const NumericPolicy& policy) {
  return sqrt_positive(mul(star(a), a), policy);
}

AlgebraElement regularized_inv_sqrt(const AlgebraElement& a, Real eps, const NumericPolicy& policy) {
  if (!(eps > 0)) throw DomainError("regularized_inv_sqrt: epsilon must be positive");
  if (!is_positive(a, policy)) throw DomainError("regularized_inv_sqrt: element is not positive");
  return map_leaves(a, [eps](const AlgebraDescriptor::Leaf& l, const Matrix& x) {
    return leaf_function(l, x, [eps](Real lambda) { return 1 / std::sqrt(std::max(lambda, 0.0) + eps); });
  });
}

bool cube_norm_identity_check(const AlgebraElement& a, const NumericPolicy& policy) {
  if (!is_self_adjoint(a, policy)) throw DomainError("cube_norm_identity_check: element is not self-adjoint");
  const Real n = cstar_norm(a);
  const Real n3 = cstar_norm(mul(mul(a, a), a));
  return std::abs(n3 - n * n * n) <= policy.tol_eq * (1 + n * n * n);
}

Real generalized_max_ratio(const AlgebraElement& b, const AlgebraElement& a) {
  require_same(a, b, "generalized_max_ratio");
  constexpr Real inf = std::numeric_limits<Real>::infinity();
  const auto& leaves = a.descriptor().leaves();
  const Real scale = cstar_norm(a);
  const Real floor = 1e-13 * scale;
  Real k = 0;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const Matrix& ab = a.block(i);
    const Matrix& bb = b.block(i);
    if (leaves[i].kind == Kind::functions) {
      for (Eigen::Index t = 0; t < ab.rows(); ++t) {
        const Real at = ab(t, 0).real();
        const Real bt = bb(t, 0).real();
        if (at <= floor) {
          if (bt > floor) return inf;
          continue;
        }
        k = std::max(k, bt / at);
      }
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> es(spectral::hermitian_part(ab));
      if (es.eigenvalues()(0) <= floor) return inf;
      const Eigen::VectorXd inv_root = es.eigenvalues().cwiseSqrt().cwiseInverse();
      const Matrix w = es.eigenvectors() * inv_root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
      k = std::max(k, spectral::max_eigenvalue(Matrix(w * bb * w)));
    }
  }
  return k;
}

Eigen::VectorXd self_adjoint_coordinates(const AlgebraElement& a) {
  Eigen::VectorXd coords(a.descriptor().self_adjoint_dimension());
  const auto& leaves = a.descriptor().leaves();
  Eigen::Index k = 0;
  const Real root2 = std::sqrt(2.0);
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const Matrix& x = a.block(i);
    if (leaves[i].kind == Kind::functions) {
      for (Eigen::Index t = 0; t < x.rows(); ++t) coords(k++) = x(t, 0).real();
      continue;
    }
    const Matrix h = spectral::hermitian_part(x);
    for (Eigen::Index r = 0; r < h.rows(); ++r) {
      coords(k++) = h(r, r).real();
      for (Eigen::Index c = r + 1; c < h.cols(); ++c) {
        coords(k++) = root2 * h(r, c).real();
        coords(k++) = root2 * h(r, c).imag();
      }
    }
  }
  return coords;
}

}  // namespace csip
