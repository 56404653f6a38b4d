#pragma once

// Lumer-Giles semi-inner products on C^d.
//
// Convention used project-wide: sip(x, y) is linear in y and conjugate
// homogeneous in x. For l^p with 1 < p < inf the Giles form is
//
//   sip(x, y) = sum_i conj(sgn x_i) |x_i|^{p-1} y_i / ||x||_p^{p-2},
//
// i.e. the support functional of x scaled by ||x||_p, applied to y. It
// reduces to the Hilbert inner product at p = 2, and sip(0, y) = 0.

#include <cmath>
#include <span>
#include <vector>

#include "csip/types.hpp"

namespace csip {

class SipSpace {
 public:
  enum class Kind { hilbert, lp };

  static SipSpace hilbert(int d);
  static SipSpace lp(int d, Real p);

  Kind kind() const { return kind_; }
  int dim() const { return d_; }
  /// Exponent; 2 for Hilbert spaces.
  Real p() const { return p_; }

  bool operator==(const SipSpace&) const = default;

 private:
  SipSpace(Kind kind, int d, Real p) : kind_(kind), d_(d), p_(p) {}
  Kind kind_;
  int d_;
  Real p_;
};

struct SipVector {
  SipVector(SipSpace space, Vector coords);

  SipSpace space;
  Vector coords;
};

namespace detail {

template <typename DX>
Real lp_norm(const Eigen::MatrixBase<DX>& x, Real p) {
  Real s = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)), p);
  return std::pow(s, 1 / p);
}

}  // namespace detail

/// Support-functional weights w with sip(x, y) = w^H y.
template <typename DX>
Vector giles_weights(const SipSpace& space, const Eigen::MatrixBase<DX>& x) {
  if (space.kind() == SipSpace::Kind::hilbert) return x;
  const Real p = space.p();
  const Real norm = detail::lp_norm(x, p);
  Vector w = Vector::Zero(x.size());
  if (norm == 0) return w;
  const Real denom = std::pow(norm, p - 2);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const Real r = std::abs(x(i));
    if (r == 0) continue;
    w(i) = (Complex(x(i)) / r) * (std::pow(r, p - 1) / denom);
  }
  return w;
}

template <typename DX, typename DY>
Complex sip(const SipSpace& space, const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
  if (x.size() != space.dim() || y.size() != space.dim())
    throw StructuralError("sip: vector length does not match the space dimension");
  if (space.kind() == SipSpace::Kind::hilbert) return (x.array().conjugate() * y.array()).sum();
  const Real p = space.p();
  const Real norm = detail::lp_norm(x, p);
  if (norm == 0) return Complex(0);
  Complex acc(0);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const Real r = std::abs(x(i));
    if (r == 0) continue;
    acc += std::conj(Complex(x(i)) / r) * std::pow(r, p - 1) * Complex(y(i));
  }
  return acc / std::pow(norm, p - 2);
}

Complex sip(const SipVector& x, const SipVector& y);

template <typename DX>
Real sip_norm(const SipSpace& space, const Eigen::MatrixBase<DX>& x) {
  return std::sqrt(std::max(0.0, sip(space, x, x).real()));
}

Real sip_norm(const SipVector& x);

/// Re sip(x + t y, y) for each t of a strictly decreasing positive grid.
std::vector<Real> sip_continuity_probe(const SipVector& x, const SipVector& y, std::span<const Real> t_grid);

}  // namespace csip
