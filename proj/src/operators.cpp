#include "csip/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csip/json_io.hpp"
#include "csip/random.hpp"
#include "csip/spectral.hpp"

namespace csip {

namespace {

// The bundle underlying d: d itself, or the base of a transport of a bundle.
const ModuleDescriptor* bundle_core(const ModuleDescriptor& d) {
  if (d.kind() == ModuleDescriptor::Kind::bundle) return &d;
  if (d.kind() == ModuleDescriptor::Kind::transported && d.base().kind() == ModuleDescriptor::Kind::bundle)
    return &d.base();
  return nullptr;
}

const ModuleDescriptor* matrix_core(const ModuleDescriptor& d) {
  if (d.kind() == ModuleDescriptor::Kind::matrix_self) return &d;
  if (d.kind() == ModuleDescriptor::Kind::transported && d.base().kind() == ModuleDescriptor::Kind::matrix_self)
    return &d.base();
  return nullptr;
}

Real fiber_norm(const SipSpace& s, const Vector& v) {
  return s.kind() == SipSpace::Kind::hilbert ? v.norm() : detail::lp_norm(v, s.p());
}

Real value_norm(const OperatorValue& v) {
  if (const auto* m = std::get_if<ModuleElement>(&v)) return triple_norm(*m);
  return cstar_norm(std::get<AlgebraElement>(v));
}

// [u, v] in the codomain; the algebra as a module over itself has [b, c] = b* c.
AlgebraElement codomain_csip(const OperatorValue& u, const OperatorValue& v) {
  if (const auto* m = std::get_if<ModuleElement>(&u)) return csip(*m, std::get<ModuleElement>(v));
  return mul(star(std::get<AlgebraElement>(u)), std::get<AlgebraElement>(v));
}

OperatorValue value_action(const OperatorValue& v, const AlgebraElement& a) {
  if (const auto* m = std::get_if<ModuleElement>(&v)) return module_action(*m, a);
  return mul(std::get<AlgebraElement>(v), a);
}

Real value_diff_norm(const OperatorValue& u, const OperatorValue& v) {
  if (const auto* m = std::get_if<ModuleElement>(&u)) return triple_norm(sub(*m, std::get<ModuleElement>(v)));
  return cstar_norm(sub(std::get<AlgebraElement>(u), std::get<AlgebraElement>(v)));
}

nlohmann::json value_to_json(const OperatorValue& v) {
  if (const auto* m = std::get_if<ModuleElement>(&v)) return to_json(*m);
  return to_json(std::get<AlgebraElement>(v));
}

// Random search that keeps improving moves and halves the step after
// repeated misses. The objective must be scale invariant.
template <typename Objective>
std::vector<Matrix> hill_climb(std::vector<Matrix> start, Objective&& objective, Rng& rng, int iterations) {
  Real best = objective(start);
  Real step = 0.5;
  int misses = 0;
  for (int it = 0; it < iterations && step > 1e-10; ++it) {
    Real scale = 0;
    for (const auto& b : start) scale = std::max(scale, b.norm());
    if (scale == 0) scale = 1;
    std::vector<Matrix> cand = start;
    for (auto& b : cand) b += (step * scale) * random_matrix(rng, b.rows(), b.cols());
    const Real v = objective(cand);
    if (v > best) {
      best = v;
      start = std::move(cand);
      misses = 0;
    } else if (++misses >= 4) {
      step *= 0.5;
      misses = 0;
    }
  }
  return start;
}

// Largest ratio of T_t v to v over one fiber pair, with its argmax.
std::pair<Real, Vector> fiber_norm_ascent(const Matrix& tt, const SipSpace& from, const SipSpace& to, Rng& rng) {
  Eigen::JacobiSVD<Matrix> svd(tt, Eigen::ComputeFullV);
  Vector v = svd.matrixV().col(0);
  auto ratio = [&](const Vector& u) {
    const Real d = fiber_norm(from, u);
    return d == 0 ? 0.0 : fiber_norm(to, tt * u) / d;
  };
  if (from.kind() == SipSpace::Kind::hilbert && to.kind() == SipSpace::Kind::hilbert) return {svd.singularValues()(0), v};
  for (int i = 0; i < 16; ++i) {
    Vector u = random_matrix(rng, tt.cols(), 1);
    if (ratio(u) > ratio(v)) v = u;
  }
  auto climbed = hill_climb({Matrix(v)}, [&](const std::vector<Matrix>& b) { return ratio(b[0].col(0)); }, rng, 400);
  v = climbed[0].col(0);
  return {ratio(v), v};
}

Real k_ratio(const ModuleOperator& t, const ModuleElement& x) {
  const Real k = generalized_max_ratio(image_csip(t, x), csip(x, x));
  return std::isfinite(k) ? k : -1.0;
}

Real norm_ratio(const ModuleOperator& t, const ModuleElement& x) {
  const Real nx = triple_norm(x);
  return nx == 0 ? 0.0 : image_norm(t, x) / nx;
}

Real exact_norm(const ModuleOperator& t) {
  switch (t.kind()) {
    case ModuleOperator::Kind::dual:
      return triple_norm(t.y());
    case ModuleOperator::Kind::leftmult:
      return spectral::operator_norm(t.c());
    default: {
      Real best = 0;
      for (const auto& b : t.blocks()) best = std::max(best, b.size() ? spectral::operator_norm(b) : 0.0);
      return best;
    }
  }
}

BoundReport analyze(const ModuleOperator& t, int sample_count, std::uint64_t seed, const NumericPolicy& policy) {
  if (sample_count < 1) throw DomainError("operator bounds need at least one sample");
  const auto& domain = t.domain_ptr();
  BoundReport r;
  Real best_k = 0;
  auto consider = [&](const ModuleElement& x) {
    const Real nr = norm_ratio(t, x);
    const Real nx = triple_norm(x);
    if (nx > 0 && (nr > r.op_norm_lb || !r.witness)) {
      r.op_norm_lb = nr;
      r.witness = scalar_mul(1 / nx, x);
    }
    best_k = std::max(best_k, k_ratio(t, x));
  };

  const std::string tag = "opnorm/" + t.domain().label();
  for (int i = 0; i < sample_count; ++i) {
    Rng rng(seed, tag, static_cast<std::uint64_t>(i));
    consider(random_module_element(rng, domain));
  }

  Rng rng(seed, tag + "/ascent", 0);
  switch (t.kind()) {
    case ModuleOperator::Kind::dual: {
      const ModuleElement& y = t.y();
      if (!y.is_zero()) {
        consider(y);
        // A nearby invertible point in case [y, y] is singular.
        consider(axpy(y, 1e-9 * triple_norm(y), random_module_element(rng, domain)));
      }
      break;
    }
    case ModuleOperator::Kind::leftmult: {
      Eigen::JacobiSVD<Matrix> svd(t.c(), Eigen::ComputeFullV);
      consider(ModuleElement(domain, {svd.matrixV()}));
      break;
    }
    case ModuleOperator::Kind::fibered: {
      const auto& from = bundle_core(t.domain())->fibers();
      const auto& to = bundle_core(*t.codomain_ptr())->fibers();
      std::vector<Matrix> blocks;
      for (std::size_t i = 0; i < from.size(); ++i) {
        auto [ratio, v] = fiber_norm_ascent(t.blocks()[i], from[i], to[i], rng);
        const Real nv = fiber_norm(from[i], v);
        blocks.push_back(nv > 0 ? Matrix(v / nv) : Matrix(random_matrix(rng, v.size(), 1)));
      }
      consider(ModuleElement(domain, std::move(blocks)));
      break;
    }
    case ModuleOperator::Kind::mixing: {
      ModuleElement start = r.witness ? *r.witness : random_module_element(rng, domain);
      auto by_norm = hill_climb(
          start.blocks(), [&](const std::vector<Matrix>& b) { return norm_ratio(t, ModuleElement(domain, b)); }, rng,
          400);
      consider(ModuleElement(domain, std::move(by_norm)));
      auto by_k = hill_climb(
          start.blocks(), [&](const std::vector<Matrix>& b) { return k_ratio(t, ModuleElement(domain, b)); }, rng, 400);
      consider(ModuleElement(domain, std::move(by_k)));
      break;
    }
  }

  if (t.has_exact_norm()) r.op_norm_exact = exact_norm(t);
  r.k_min_est = std::max(best_k, r.op_norm_lb * r.op_norm_lb);

  r.k_validated = true;
  const Real k = r.k_min_est * (1 + policy.tol_pos);
  for (int i = 0; i < sample_count; ++i) {
    Rng fresh(seed, tag + "/validate", static_cast<std::uint64_t>(i));
    const ModuleElement x = random_module_element(fresh, domain);
    if (!leq(image_csip(t, x), scalar_mul(k, csip(x, x)), policy)) {
      r.k_validated = false;
      break;
    }
  }
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------

ModuleOperator ModuleOperator::fibered(ModuleDescriptor domain, ModuleDescriptor codomain, std::vector<Matrix> blocks) {
  const ModuleDescriptor* from = bundle_core(domain);
  const ModuleDescriptor* to = bundle_core(codomain);
  if (!from || !to) throw StructuralError("fibered operator: domain and codomain must be bundles");
  if (from->fibers().size() != to->fibers().size())
    throw StructuralError("fibered operator: domain and codomain have different point sets");
  const bool from_transported = from != &domain;
  const bool to_transported = to != &codomain;
  if (from_transported != to_transported || (from_transported && !(domain.iso() == codomain.iso())))
    throw StructuralError("fibered operator: domain and codomain carry different algebra actions");
  if (blocks.size() != from->fibers().size())
    throw StructuralError("fibered operator: block count differs from the number of points");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].rows() != to->fibers()[i].dim() || blocks[i].cols() != from->fibers()[i].dim())
      throw StructuralError("fibered operator: block " + std::to_string(i) + " has the wrong shape");
    if (!blocks[i].allFinite()) throw StructuralError("fibered operator: non-finite block");
  }
  ModuleOperator t;
  t.kind_ = Kind::fibered;
  t.domain_ = std::make_shared<const ModuleDescriptor>(std::move(domain));
  t.codomain_ = std::make_shared<const ModuleDescriptor>(std::move(codomain));
  t.blocks_ = std::move(blocks);
  return t;
}

ModuleOperator ModuleOperator::leftmult(Matrix c) {
  const auto n = static_cast<int>(c.rows());
  return leftmult(ModuleDescriptor::matrix_self(n), std::move(c));
}

ModuleOperator ModuleOperator::leftmult(ModuleDescriptor domain, Matrix c) {
  const ModuleDescriptor* core = matrix_core(domain);
  if (!core) throw StructuralError("leftmult operator: domain must be a matrix module");
  if (c.rows() != core->size() || c.cols() != core->size())
    throw StructuralError("leftmult operator: c must be " + std::to_string(core->size()) + " x " +
                          std::to_string(core->size()));
  if (!c.allFinite()) throw StructuralError("leftmult operator: non-finite entries");
  ModuleOperator t;
  t.kind_ = Kind::leftmult;
  t.domain_ = std::make_shared<const ModuleDescriptor>(std::move(domain));
  t.codomain_ = t.domain_;
  t.blocks_ = {std::move(c)};
  return t;
}

ModuleOperator ModuleOperator::dual(ModuleElement y) {
  ModuleOperator t;
  t.kind_ = Kind::dual;
  t.domain_ = y.descriptor_ptr();
  t.y_ = std::move(y);
  return t;
}

ModuleOperator ModuleOperator::mixing(ModuleDescriptor domain) {
  ModuleOperator t;
  t.kind_ = Kind::mixing;
  t.domain_ = std::make_shared<const ModuleDescriptor>(std::move(domain));
  t.codomain_ = t.domain_;
  const int count = t.domain_->block_count();
  t.shift_.resize(count);
  t.blocks_.assign(count, Matrix());
  // Cycle each block to the next one of the same shape; a block with no
  // partner is multiplied on the right by a non-central matrix instead.
  for (int i = 0; i < count; ++i) {
    const auto shape = t.domain_->block_shape(i);
    int partner = i;
    for (int k = 1; k < count; ++k) {
      const int j = (i + k) % count;
      if (t.domain_->block_shape(j) == shape) {
        partner = j;
        break;
      }
    }
    t.shift_[i] = partner;
    if (partner == i && shape.first == shape.second && shape.first >= 2) {
      Matrix m = Matrix::Identity(shape.first, shape.first);
      for (int k = 0; k + 1 < shape.first; ++k) m(k, k + 1) = 1;
      t.blocks_[i] = m;
    }
  }
  return t;
}

bool ModuleOperator::has_exact_norm() const {
  switch (kind_) {
    case Kind::dual:
    case Kind::leftmult:
      return true;
    case Kind::fibered:
      return bundle_core(*domain_)->is_hilbert() && bundle_core(*codomain_)->is_hilbert();
    default:
      return false;
  }
}

OperatorValue apply(const ModuleOperator& t, const ModuleElement& x) {
  if (!(x.descriptor() == t.domain())) throw StructuralError("apply: element is not in the operator's domain");
  switch (t.kind()) {
    case ModuleOperator::Kind::dual:
      return csip(t.y(), x);
    case ModuleOperator::Kind::leftmult:
      return ModuleElement(t.codomain_ptr(), {t.c() * x.block(0)});
    case ModuleOperator::Kind::fibered: {
      std::vector<Matrix> out;
      out.reserve(t.blocks().size());
      for (std::size_t i = 0; i < t.blocks().size(); ++i) out.push_back(t.blocks()[i] * x.block(i));
      return ModuleElement(t.codomain_ptr(), std::move(out));
    }
    case ModuleOperator::Kind::mixing:
      break;
  }
  std::vector<Matrix> out;
  out.reserve(x.blocks().size());
  for (std::size_t i = 0; i < x.blocks().size(); ++i) {
    const Matrix& src = x.block(static_cast<std::size_t>(t.shift()[i]));
    out.push_back(t.blocks()[i].size() ? Matrix(src * t.blocks()[i]) : src);
  }
  return ModuleElement(t.codomain_ptr(), std::move(out));
}

AlgebraElement image_csip(const ModuleOperator& t, const ModuleElement& x) {
  const OperatorValue v = apply(t, x);
  return codomain_csip(v, v);
}

Real image_norm(const ModuleOperator& t, const ModuleElement& x) { return value_norm(apply(t, x)); }

VerificationReport check_A_linear(const ModuleOperator& t, int sample_count, std::uint64_t seed,
                                  const NumericPolicy& policy) {
  const auto& domain = t.domain_ptr();
  VerificationReport r("a-linearity", domain->label(), policy.tol_eq);
  for (int i = 0; i < sample_count; ++i) {
    Rng rng(seed, "a-linearity/" + domain->label(), static_cast<std::uint64_t>(i));
    const ModuleElement x = random_module_element(rng, domain);
    const AlgebraElement a = random_algebra_element(rng, domain->algebra_ptr());
    const ModuleElement xa = module_action(x, a);
    const OperatorValue lhs = apply(t, xa);
    const OperatorValue rhs = value_action(apply(t, x), a);
    const Real scale = value_norm(rhs) + value_norm(lhs);
    r.record(-value_diff_norm(lhs, rhs) / (1 + scale), [&] { return Json{{"x", to_json(x)}, {"a", to_json(a)}}; });
  }
  return r;
}

BoundReport op_norm(const ModuleOperator& t, int sample_count, std::uint64_t seed, const NumericPolicy& policy) {
  return analyze(t, sample_count, seed, policy);
}

BoundReport min_K(const ModuleOperator& t, int sample_count, std::uint64_t seed, const NumericPolicy& policy) {
  return analyze(t, sample_count, seed, policy);
}

ModuleElement regularized_normalize(const ModuleElement& x, int n, const NumericPolicy& policy) {
  if (n < 1) throw DomainError("regularized_normalize: n must be a positive integer");
  return module_action(x, regularized_inv_sqrt(csip(x, x), 1.0 / n, policy));
}

VerificationReport johnson_property_check(const ModuleOperator& t, const OperatorValue& y, int sample_count,
                                          std::uint64_t seed, const NumericPolicy& policy) {
  const auto& domain = t.domain_ptr();
  VerificationReport r("module-map", domain->label(), policy.tol_eq);
  Real k = 0;
  if (t.has_exact_norm()) {
    const Real n = exact_norm(t);
    k = n * n;
  } else {
    k = min_K(t, std::max(1, sample_count / 4), seed, policy).k_min_est * (1 + policy.tol_pos);
    r.note = "K from the sampled estimate";
  }
  const Real ny = value_norm(y);
  for (int i = 0; i < sample_count; ++i) {
    Rng rng(seed, "johnson/" + domain->label(), static_cast<std::uint64_t>(i));
    const ModuleElement x = random_module_element(rng, domain);
    const AlgebraElement a = random_algebra_element(rng, domain->algebra_ptr());
    const ModuleElement xa = module_action(x, a);
    const OperatorValue txa = apply(t, xa);
    const AlgebraElement ra = codomain_csip(y, txa);
    const AlgebraElement r1 = codomain_csip(y, apply(t, x));
    const Real nx = triple_norm(x);
    const Real na = cstar_norm(a);

    const Real top = ny * ny * k * nx * nx * na * na;
    const Real conclusion = -cstar_norm(sub(ra, mul(r1, a))) / (1 + std::sqrt(top));

    const AlgebraElement rr = mul(star(ra), ra);
    const AlgebraElement image = codomain_csip(txa, txa);
    const AlgebraElement xaxa = csip(xa, xa);
    const AlgebraElement aa = mul(star(a), a);
    const Real link1 = min_spectrum(sub(scalar_mul(ny * ny, image), rr)) / (1 + top);
    const Real link2 = min_spectrum(sub(scalar_mul(k, xaxa), image)) / (1 + k * nx * nx * na * na);
    const Real link3 = min_spectrum(sub(scalar_mul(nx * nx, aa), xaxa)) / (1 + nx * nx * na * na);
    const Real chain = min_spectrum(sub(scalar_mul(ny * ny * k * nx * nx, aa), rr)) / (1 + top);

    r.record(std::min({conclusion, link1, link2, link3, chain}), [&] {
      return Json{{"x", to_json(x)}, {"a", to_json(a)}, {"y", value_to_json(y)}};
    });
  }
  return r;
}

nlohmann::json to_json(const ModuleOperator& t) {
  switch (t.kind()) {
    case ModuleOperator::Kind::fibered: {
      Json blocks = Json::array();
      for (const auto& b : t.blocks()) blocks.push_back(matrix_to_json(b));
      return {{"kind", "fibered"}, {"domain", to_json(t.domain())}, {"codomain", to_json(*t.codomain_ptr())},
              {"blocks", blocks}};
    }
    case ModuleOperator::Kind::leftmult:
      return {{"kind", "leftmult"}, {"domain", to_json(t.domain())}, {"c", matrix_to_json(t.c())}};
    case ModuleOperator::Kind::dual:
      return {{"kind", "dual"}, {"y", to_json(t.y())}};
    case ModuleOperator::Kind::mixing:
      return {{"kind", "mixing"}, {"domain", to_json(t.domain())}};
  }
  return {};
}

ModuleOperator operator_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw UsageError("operator literal needs a \"kind\" string");
  const std::string kind = j["kind"];
  try {
    if (kind == "fibered") {
      std::vector<Matrix> blocks;
      for (const auto& b : j.at("blocks")) blocks.push_back(matrix_from_json(b));
      const ModuleDescriptor domain = module_descriptor_from_json(j.at("domain"));
      const ModuleDescriptor codomain = j.contains("codomain") ? module_descriptor_from_json(j["codomain"]) : domain;
      return ModuleOperator::fibered(domain, codomain, std::move(blocks));
    }
    if (kind == "leftmult") {
      Matrix c = matrix_from_json(j.at("c"));
      if (j.contains("domain")) return ModuleOperator::leftmult(module_descriptor_from_json(j["domain"]), std::move(c));
      return ModuleOperator::leftmult(std::move(c));
    }
    if (kind == "dual") return ModuleOperator::dual(module_element_from_json(j.at("y")));
    if (kind == "mixing") return ModuleOperator::mixing(module_descriptor_from_json(j.at("domain")));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("operator literal: ") + e.what());
  }
  throw UsageError("unknown operator kind \"" + kind + "\"");
}

nlohmann::json to_json(const BoundReport& r) {
  Json j;
  j["op_norm_lb"] = r.op_norm_lb;
  j["op_norm_exact"] = r.op_norm_exact ? Json(*r.op_norm_exact) : Json(nullptr);
  j["k_min_est"] = r.k_min_est;
  j["k_validated"] = r.k_validated;
  j["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  return j;
}

std::vector<VerificationReport> verify_operators(const ModuleDescriptor& desc, int sample_count, std::uint64_t seed,
                                                 const NumericPolicy& policy, bool inject_mixing) {
  const auto module = std::make_shared<const ModuleDescriptor>(desc);
  const std::string label = desc.label();
  Rng rng(seed, "operators/" + label, 0);

  std::vector<ModuleOperator> ops;
  ops.push_back(ModuleOperator::dual(random_module_element(rng, module)));
  if (inject_mixing) {
    ops.push_back(ModuleOperator::mixing(desc));
  } else if (const ModuleDescriptor* core = bundle_core(desc)) {
    std::vector<Matrix> blocks;
    for (const auto& f : core->fibers()) blocks.push_back(random_matrix(rng, f.dim(), f.dim()));
    ops.push_back(ModuleOperator::fibered(desc, desc, std::move(blocks)));
  } else if (const ModuleDescriptor* core = matrix_core(desc)) {
    ops.push_back(ModuleOperator::leftmult(desc, random_matrix(rng, core->size(), core->size())));
  }

  VerificationReport linear("a-linearity", label, policy.tol_eq);
  VerificationReport dual_norm("dual-norm", label, 1e-3);
  VerificationReport dual_lower("dual-witness", label, 1e-6);
  VerificationReport dual_cs("cauchy-schwarz-bound", label, 1e-9);
  VerificationReport sup_formula("sup-formula", label, 1e-3);
  VerificationReport consistency("bound-consistency", label, policy.tol_eq);
  VerificationReport bounded_ineq("bounded-implies-inequality", label, policy.tol_pos);
  VerificationReport ineq_bounded("inequality-implies-bounded", label, policy.tol_eq);
  VerificationReport norm_formula("norm-formula", label, 1e-6);
  VerificationReport normalizer("regularized-normalizer", label, policy.tol_eq);
  VerificationReport johnson("module-map", label, policy.tol_eq);

  for (std::size_t k = 0; k < ops.size(); ++k) {
    const ModuleOperator& t = ops[k];
    const std::uint64_t op_seed = mix_seed(seed, label, k);
    linear.absorb(check_A_linear(t, sample_count, op_seed, policy));

    const BoundReport bound = op_norm(t, sample_count, op_seed, policy);
    const Real lb = bound.op_norm_lb;
    if (bound.op_norm_exact) {
      const Real ex = *bound.op_norm_exact;
      consistency.record((ex - lb) / (1 + ex), [&] { return to_json(t); });
      norm_formula.record(-std::abs(ex - std::sqrt(bound.k_min_est)) / (1 + ex), [&] { return to_json(t); });
    }
    consistency.record((bound.k_min_est - lb * lb) / (1 + lb * lb), [&] { return to_json(t); });

    if (t.kind() == ModuleOperator::Kind::dual) {
      const Real ny = triple_norm(t.y());
      dual_norm.record(-std::abs(lb - ny) / std::max(ny, 1e-300), [&] { return to_json(t); });
      dual_lower.record((lb - ny) / (1 + ny), [&] { return to_json(t); });
    }

    // K from the closed form when there is one, else the validated estimate.
    const Real nt = bound.op_norm_exact ? *bound.op_norm_exact : std::sqrt(bound.k_min_est);
    const Real kk = bound.op_norm_exact ? nt * nt : bound.k_min_est * (1 + policy.tol_pos);
    ineq_bounded.record((std::sqrt(kk) - lb) / (1 + std::sqrt(kk)), [&] { return to_json(t); });

    for (int i = 0; i < sample_count; ++i) {
      Rng s(op_seed, "operators/samples", static_cast<std::uint64_t>(i));
      const ModuleElement x = scalar_mul(std::exp(s.normal()), random_module_element(s, module));
      const AlgebraElement xx = csip(x, x);
      const Real nx2 = cstar_norm(xx);
      const AlgebraElement gap = sub(scalar_mul(kk, xx), image_csip(t, x));
      bounded_ineq.record(min_spectrum(gap) / (1 + kk * nx2),
                          [&] { return Json{{"operator", to_json(t)}, {"x", to_json(x)}}; });
      if (t.kind() == ModuleOperator::Kind::dual) {
        const Real ny = triple_norm(t.y());
        const Real bound_cs = ny * std::sqrt(nx2);
        dual_cs.record((bound_cs - image_norm(t, x)) / (1 + bound_cs),
                       [&] { return Json{{"operator", to_json(t)}, {"x", to_json(x)}}; });
      }
    }

    OperatorValue y_cod = t.kind() == ModuleOperator::Kind::dual
                              ? OperatorValue(random_algebra_element(rng, module->algebra_ptr()))
                              : OperatorValue(random_module_element(rng, t.codomain_ptr()));
    johnson.absorb(johnson_property_check(t, y_cod, sample_count, op_seed, policy));
  }

  for (int i = 0; i < sample_count; ++i) {
    Rng s(seed, "operators/sup/" + label, static_cast<std::uint64_t>(i));
    const ModuleElement x = scalar_mul(std::exp(s.normal()), random_module_element(s, module));
    const Real nx = triple_norm(x);
    if (nx == 0) continue;
    // sup over unit y of ||[x, y]||: a few random unit directions plus x/|||x|||.
    Real sup = cstar_norm(csip(x, scalar_mul(1 / nx, x)));
    for (int j = 0; j < 4; ++j) {
      const ModuleElement y = random_module_element(s, module);
      const Real ny = triple_norm(y);
      if (ny > 0) sup = std::max(sup, cstar_norm(csip(x, y)) / ny);
    }
    sup_formula.record(-std::abs(sup - nx) / nx, [&] { return Json{{"x", to_json(x)}}; });

    Real previous = 0;
    Real margin = std::numeric_limits<Real>::infinity();
    for (int n : {1, 10, 100, 1000}) {
      const ModuleElement xn = regularized_normalize(x, n, policy);
      const AlgebraElement g = csip(xn, xn);
      const Real norm = triple_norm(xn);
      margin = std::min({margin, 1 - norm, min_spectrum(sub(AlgebraElement::one(module->algebra_ptr()), g)),
                         norm - previous + 1e-12});
      previous = norm;
    }
    normalizer.record(margin, [&] { return Json{{"x", to_json(x)}}; });
  }

  std::vector<VerificationReport> out{linear, consistency, ineq_bounded, bounded_ineq, norm_formula, sup_formula,
                                      normalizer, johnson};
  out.push_back(dual_norm);
  out.push_back(dual_lower);
  out.push_back(dual_cs);
  return out;
}

}  // namespace csip
