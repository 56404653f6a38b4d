#include "csip/module_checks.hpp"

#include <cmath>

#include "csip/json_io.hpp"
#include "csip/random.hpp"

namespace csip {

namespace {

// Log-normal magnitude so the checks see a spread of scales.
Real random_scale(Rng& rng) { return std::exp(rng.normal()); }

Real rel_diff(const AlgebraElement& a, const AlgebraElement& b, Real scale) {
  return cstar_norm(sub(a, b)) / (1 + scale);
}

Json pair_witness(const ModuleElement& x, const ModuleElement& y) { return {{"x", to_json(x)}, {"y", to_json(y)}}; }

}  // namespace

std::vector<VerificationReport> verify_axioms(const ModuleDescriptor& desc, int sample_count, std::uint64_t seed,
                                              const NumericPolicy& policy) {
  const auto module = std::make_shared<const ModuleDescriptor>(desc);
  const auto& algebra = module->algebra_ptr();
  const std::string label = desc.label();

  VerificationReport positivity("axiom-i-positivity", label, policy.tol_pos);
  VerificationReport definiteness("axiom-i-definiteness", label, 0.0);
  VerificationReport linearity("axiom-ii-linearity", label, policy.tol_eq);
  VerificationReport right_action("axiom-iii-right-action", label, policy.tol_eq);
  VerificationReport left_action("axiom-iii-adjoint-action", label, policy.tol_eq);
  VerificationReport scalars("scalar-compatibility", label, policy.tol_eq);
  VerificationReport cs_operator("axiom-iv-cauchy-schwarz-operator", label, policy.tol_pos);
  VerificationReport cs_scalar("axiom-iv-cauchy-schwarz-scalar", label, policy.tol_eq);

  {
    const ModuleElement zero = ModuleElement::zero(module);
    const Real z = cstar_norm(csip(zero, zero));
    definiteness.record(z == 0 ? 0.0 : -1.0, [&] { return Json{{"x", to_json(zero)}}; });
  }

  for (int trial = 0; trial < sample_count; ++trial) {
    Rng rng(seed, "axioms/" + label, static_cast<std::uint64_t>(trial));
    const ModuleElement x = scalar_mul(random_scale(rng), random_module_element(rng, module));
    const ModuleElement y = scalar_mul(random_scale(rng), random_module_element(rng, module));
    const ModuleElement y2 = random_module_element(rng, module);
    const Complex alpha = rng.complex_normal();
    const Complex beta = rng.complex_normal();
    const AlgebraElement a = random_algebra_element(rng, algebra);

    const AlgebraElement xx = csip(x, x);
    const AlgebraElement yy = csip(y, y);
    const AlgebraElement yx = csip(y, x);
    const AlgebraElement xy = csip(x, y);
    const Real nx = std::sqrt(cstar_norm(xx));
    const Real ny = std::sqrt(cstar_norm(yy));
    const Real ny2 = triple_norm(y2);
    const Real na = cstar_norm(a);

    // (i)
    {
      const Real scale = 1 + cstar_norm(xx);
      const Real sa_defect = cstar_norm(sub(xx, star(xx))) / scale;
      positivity.record(std::min(min_spectrum(xx) / scale, -sa_defect), [&] { return Json{{"x", to_json(x)}}; });
      definiteness.record(cstar_norm(xx) > 0 ? 0.0 : -1.0, [&] { return Json{{"x", to_json(x)}}; });
    }
    // (ii)
    {
      const AlgebraElement lhs = csip(x, add(scalar_mul(alpha, y), scalar_mul(beta, y2)));
      const AlgebraElement rhs = add(scalar_mul(alpha, xy), scalar_mul(beta, csip(x, y2)));
      const Real scale = std::abs(alpha) * nx * ny + std::abs(beta) * nx * ny2;
      linearity.record(-rel_diff(lhs, rhs, scale), [&] { return pair_witness(x, y); });
    }
    // (iii)
    {
      const AlgebraElement lhs = csip(x, module_action(y, a));
      const AlgebraElement rhs = mul(xy, a);
      right_action.record(-rel_diff(lhs, rhs, nx * ny * na), [&] {
        Json w = pair_witness(x, y);
        w["a"] = to_json(a);
        return w;
      });
      const AlgebraElement lhs2 = csip(module_action(x, a), y);
      const AlgebraElement rhs2 = mul(star(a), xy);
      left_action.record(-rel_diff(lhs2, rhs2, nx * ny * na), [&] {
        Json w = pair_witness(x, y);
        w["a"] = to_json(a);
        return w;
      });
    }
    // [lambda x, y] = conj(lambda) [x, y]
    {
      const AlgebraElement lhs = csip(scalar_mul(alpha, x), y);
      const AlgebraElement rhs = scalar_mul(std::conj(alpha), xy);
      scalars.record(-rel_diff(lhs, rhs, std::abs(alpha) * nx * ny), [&] { return pair_witness(x, y); });
    }
    // (iv)
    {
      const Real nyy = cstar_norm(yy);
      const AlgebraElement gap = sub(scalar_mul(nyy, xx), mul(star(yx), yx));
      cs_operator.record(min_spectrum(gap) / (1 + nyy * cstar_norm(xx)), [&] { return pair_witness(x, y); });
      const Real lhs = std::pow(cstar_norm(yx), 2);
      const Real rhs = nyy * cstar_norm(xx);
      cs_scalar.record((rhs - lhs) / (1 + rhs), [&] { return pair_witness(x, y); });
    }
  }
  return {positivity, definiteness, linearity, right_action, left_action, scalars, cs_operator, cs_scalar};
}

std::vector<VerificationReport> verify_norm_properties(const ModuleDescriptor& desc, int sample_count,
                                                       std::uint64_t seed, const NumericPolicy& policy) {
  const auto module = std::make_shared<const ModuleDescriptor>(desc);
  const auto& algebra = module->algebra_ptr();
  const std::string label = desc.label();

  VerificationReport triangle("norm-triangle", label, policy.tol_eq);
  VerificationReport homogeneity("norm-homogeneity", label, policy.tol_eq);
  VerificationReport separation("norm-separation", label, 0.0);
  VerificationReport submult("norm-submultiplicative", label, policy.tol_eq);
  VerificationReport cubic("norm-cubic-identity", label, policy.tol_eq);
  VerificationReport cube_algebra("algebra-cube-identity", label, policy.tol_eq);

  separation.record(triple_norm(ModuleElement::zero(module)) == 0 ? 0.0 : -1.0);

  for (int trial = 0; trial < sample_count; ++trial) {
    Rng rng(seed, "norms/" + label, static_cast<std::uint64_t>(trial));
    const ModuleElement x = scalar_mul(random_scale(rng), random_module_element(rng, module));
    const ModuleElement y = scalar_mul(random_scale(rng), random_module_element(rng, module));
    const Complex lambda = random_scale(rng) * rng.complex_normal();
    const AlgebraElement a = random_algebra_element(rng, algebra);
    const AlgebraElement h = random_self_adjoint(rng, algebra);

    const Real nx = triple_norm(x);
    const Real ny = triple_norm(y);

    const Real nsum = triple_norm(add(x, y));
    triangle.record((nx + ny - nsum) / (1 + nx + ny), [&] { return pair_witness(x, y); });

    const Real nl = triple_norm(scalar_mul(lambda, x));
    homogeneity.record(identity_margin(nl, std::abs(lambda) * nx, std::abs(lambda) * nx),
                       [&] { return Json{{"x", to_json(x)}, {"lambda", complex_to_json(lambda)}}; });

    separation.record(nx > 0 ? 0.0 : -1.0, [&] { return Json{{"x", to_json(x)}}; });

    const Real nxa = triple_norm(module_action(x, a));
    const Real bound = nx * cstar_norm(a);
    submult.record((bound - nxa) / (1 + bound), [&] { return Json{{"x", to_json(x)}, {"a", to_json(a)}}; });

    const Real ncube = triple_norm(module_action(x, csip(x, x)));
    cubic.record(identity_margin(ncube, nx * nx * nx, nx * nx * nx), [&] { return Json{{"x", to_json(x)}}; });

    const Real nh = cstar_norm(h);
    const Real nh3 = cstar_norm(mul(mul(h, h), h));
    cube_algebra.record(identity_margin(nh3, nh * nh * nh, nh * nh * nh), [&] { return Json{{"a", to_json(h)}}; });
  }
  return {triangle, homogeneity, separation, submult, cubic, cube_algebra};
}

std::vector<VerificationReport> verify_finsler(const ModuleDescriptor& desc, int sample_count, std::uint64_t seed,
                                               const NumericPolicy& policy) {
  const auto module = std::make_shared<const ModuleDescriptor>(desc);
  const auto& algebra = module->algebra_ptr();
  const std::string label = desc.label();
  const bool commutative = desc.algebra().is_commutative();

  VerificationReport action("finsler-action", label, policy.tol_eq);
  VerificationReport rho_norm("finsler-rho-norm", label, policy.tol_eq);
  VerificationReport triangle("finsler-operator-triangle", label, policy.tol_pos);
  VerificationReport cone("cone-norm", label, policy.tol_eq);
  if (!commutative) {
    triangle.note = "skipped: algebra is not commutative";
    cone.note = "skipped: algebra is not commutative";
  }

  for (int trial = 0; trial < sample_count; ++trial) {
    Rng rng(seed, "finsler/" + label, static_cast<std::uint64_t>(trial));
    const ModuleElement x = scalar_mul(random_scale(rng), random_module_element(rng, module));
    const ModuleElement y = scalar_mul(random_scale(rng), random_module_element(rng, module));
    const AlgebraElement a = random_algebra_element(rng, algebra);
    const Complex lambda = rng.complex_normal();

    const AlgebraElement rx = rho(x, policy);
    const Real nx = triple_norm(x);
    {
      const AlgebraElement r = rho(module_action(x, a), policy);
      const AlgebraElement lhs = mul(r, r);
      const AlgebraElement rhs = mul(mul(star(a), mul(rx, rx)), a);
      const Real na = cstar_norm(a);
      action.record(-rel_diff(lhs, rhs, na * na * nx * nx),
                    [&] { return Json{{"x", to_json(x)}, {"a", to_json(a)}}; });
    }
    rho_norm.record(identity_margin(cstar_norm(rx), nx, nx), [&] { return Json{{"x", to_json(x)}}; });

    if (!commutative) {
      triangle.skip();
      cone.skip();
      continue;
    }
    const AlgebraElement ry = rho(y, policy);
    const AlgebraElement gap = sub(add(rx, ry), rho(add(x, y), policy));
    triangle.record(min_spectrum(gap) / (1 + cstar_norm(rx) + cstar_norm(ry)), [&] { return pair_witness(x, y); });

    // rho takes values in the positive cone and is absolutely homogeneous.
    const AlgebraElement rl = rho(scalar_mul(lambda, x), policy);
    const Real homog = rel_diff(rl, scalar_mul(std::abs(lambda), rx), std::abs(lambda) * nx);
    cone.record(std::min(-homog, min_spectrum(rx) / (1 + nx)), [&] { return Json{{"x", to_json(x)}}; });
  }
  return {action, rho_norm, triangle, cone};
}

bool fullness_check(const ModuleDescriptor& desc, int sample_count, std::uint64_t seed, const NumericPolicy& policy) {
  const auto module = std::make_shared<const ModuleDescriptor>(desc);
  std::vector<AlgebraElement> values;
  for (int trial = 0; trial < sample_count; ++trial) {
    Rng rng(seed, "fullness/" + desc.label(), static_cast<std::uint64_t>(trial));
    const ModuleElement x = random_module_element(rng, module);
    values.push_back(csip(x, x));
  }
  return spans_algebra(values, policy);
}

VerificationReport fullness_report(const ModuleDescriptor& desc, int sample_count, std::uint64_t seed,
                                   const NumericPolicy& policy) {
  VerificationReport r("fullness", desc.label(), 0.0);
  const bool full = fullness_check(desc, sample_count, seed, policy);
  r.record(full ? 0.0 : -1.0);
  r.note = "span of " + std::to_string(sample_count) + " samples of [x,x] against self-adjoint dimension " +
           std::to_string(desc.algebra().self_adjoint_dimension());
  return r;
}

std::vector<VerificationReport> verify_transport(const ModuleDescriptor& desc, int sample_count, std::uint64_t seed,
                                                 const NumericPolicy& policy) {
  const std::string label = desc.label();
  if (desc.kind() != ModuleDescriptor::Kind::transported) {
    VerificationReport r("transport", label, 0.0);
    r.note = "skipped: not a transported module";
    return {r};
  }
  const auto module = std::make_shared<const ModuleDescriptor>(desc);
  const auto base = std::make_shared<const ModuleDescriptor>(desc.base());
  const auto& algebra = module->algebra_ptr();
  const IsoDescriptor& psi = desc.iso();

  VerificationReport csip_transport("transport-csip", label, 1e-12);
  VerificationReport norm_transport("transport-norm", label, 1e-10);
  VerificationReport action_transport("transport-action", label, policy.tol_eq);
  VerificationReport homomorphism("iso-star-homomorphism", label, policy.tol_eq);

  for (int trial = 0; trial < sample_count; ++trial) {
    Rng rng(seed, "transport/" + label, static_cast<std::uint64_t>(trial));
    const ModuleElement x = random_module_element(rng, module);
    const ModuleElement y = random_module_element(rng, module);
    const AlgebraElement a = random_algebra_element(rng, algebra);
    const AlgebraElement b = random_algebra_element(rng, algebra);
    const ModuleElement xa(base, x.blocks());
    const ModuleElement ya(base, y.blocks());

    const AlgebraElement base_value = csip(xa, ya);
    const Real scale = cstar_norm(base_value);
    csip_transport.record(-cstar_norm(sub(psi.apply(base_value), csip(x, y))) / (1 + scale),
                          [&] { return pair_witness(x, y); });

    const Real nb = triple_norm(x);
    const Real na = triple_norm(xa);
    norm_transport.record(identity_margin(nb, na, na), [&] { return Json{{"x", to_json(x)}}; });

    const ModuleElement lhs = module_action(x, psi.apply(a));
    const ModuleElement rhs(module, module_action(xa, a).blocks());
    action_transport.record(-triple_norm(sub(lhs, rhs)) / (1 + na * cstar_norm(a)),
                            [&] { return Json{{"x", to_json(x)}, {"a", to_json(a)}}; });

    const Real nab = cstar_norm(a) * cstar_norm(b);
    const Real mult = cstar_norm(sub(psi.apply(mul(a, b)), mul(psi.apply(a), psi.apply(b)))) / (1 + nab);
    const Real inv = cstar_norm(sub(psi.apply(star(a)), star(psi.apply(a)))) / (1 + cstar_norm(a));
    const Real iso = std::abs(cstar_norm(psi.apply(a)) - cstar_norm(a)) / (1 + cstar_norm(a));
    homomorphism.record(-std::max({mult, inv, iso}), [&] { return Json{{"a", to_json(a)}, {"b", to_json(b)}}; });
  }
  return {csip_transport, norm_transport, action_transport, homomorphism};
}

}  // namespace csip
