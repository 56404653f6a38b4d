#pragma once

// Dense Hermitian spectral helpers. Everything here is a thin layer over
// Eigen::SelfAdjointEigenSolver and templated on the Eigen expression type.

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace csip::spectral {

template <typename Derived>
using PlainOf = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// (a + a*) / 2
template <typename Derived>
PlainOf<Derived> hermitian_part(const Eigen::MatrixBase<Derived>& a) {
  return (a + a.adjoint()) / typename Derived::RealScalar(2);
}

/// Apply a real function to the spectrum of the Hermitian part of `a`.
template <typename Derived, typename F>
PlainOf<Derived> apply(const Eigen::MatrixBase<Derived>& a, F&& f) {
  Eigen::SelfAdjointEigenSolver<PlainOf<Derived>> es(hermitian_part(a));
  auto lambda = es.eigenvalues().unaryExpr(f).eval();
  return es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint();
}

template <typename Derived>
typename Derived::RealScalar min_eigenvalue(const Eigen::MatrixBase<Derived>& a) {
  Eigen::SelfAdjointEigenSolver<PlainOf<Derived>> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

template <typename Derived>
typename Derived::RealScalar max_eigenvalue(const Eigen::MatrixBase<Derived>& a) {
  Eigen::SelfAdjointEigenSolver<PlainOf<Derived>> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

/// Largest singular value.
template <typename Derived>
typename Derived::RealScalar operator_norm(const Eigen::MatrixBase<Derived>& a) {
  using R = typename Derived::RealScalar;
  if (a.size() == 0) return R(0);
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  Eigen::JacobiSVD<PlainOf<Derived>> svd(a);
  return svd.singularValues()(0);
}

}  // namespace csip::spectral
