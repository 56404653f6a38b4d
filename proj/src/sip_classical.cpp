#include "csip/sip_classical.hpp"

#include <string>

namespace csip {

SipSpace SipSpace::hilbert(int d) {
  if (d < 1) throw StructuralError("s.i.p. space dimension must be at least 1");
  return {Kind::hilbert, d, 2.0};
}

SipSpace SipSpace::lp(int d, Real p) {
  if (d < 1) throw StructuralError("s.i.p. space dimension must be at least 1");
  if (!(p > 1) || !std::isfinite(p))
    throw DomainError("Giles l^p space needs 1 < p < inf, got p = " + std::to_string(p));
  return {Kind::lp, d, p};
}

SipVector::SipVector(SipSpace s, Vector c) : space(s), coords(std::move(c)) {
  if (coords.size() != space.dim()) throw StructuralError("s.i.p. vector length does not match its space");
  if (!coords.allFinite()) throw StructuralError("s.i.p. vector has non-finite entries");
}

Complex sip(const SipVector& x, const SipVector& y) {
  if (!(x.space == y.space)) throw StructuralError("sip: vectors belong to different spaces");
  return sip(x.space, x.coords, y.coords);
}

Real sip_norm(const SipVector& x) { return sip_norm(x.space, x.coords); }

std::vector<Real> sip_continuity_probe(const SipVector& x, const SipVector& y, std::span<const Real> t_grid) {
  if (!(x.space == y.space)) throw StructuralError("sip_continuity_probe: vectors belong to different spaces");
  if (t_grid.empty()) throw DomainError("sip_continuity_probe: empty t grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0) || (i > 0 && !(t_grid[i] < t_grid[i - 1])))
      throw DomainError("sip_continuity_probe: t grid must be positive and strictly decreasing");
  }
  std::vector<Real> out;
  out.reserve(t_grid.size());
  for (Real t : t_grid) {
    const Vector shifted = x.coords + t * y.coords;
    out.push_back(sip(x.space, shifted, y.coords).real());
  }
  return out;
}

}  // namespace csip
