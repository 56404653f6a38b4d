#include "csip/orthogonality.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <boost/math/tools/minima.hpp>

#include "csip/json_io.hpp"
#include "csip/random.hpp"
#include "csip/spectral.hpp"

namespace csip {

namespace {

constexpr Real kPi = 3.14159265358979323846;

// What a payload block is: a fiber vector of some s.i.p. space, or a square
// matrix block of a matrix_self module.
struct BlockKind {
  bool matrix = false;
  std::optional<SipSpace> space;
};

void collect_kinds(const ModuleDescriptor& d, std::vector<BlockKind>& out) {
  switch (d.kind()) {
    case ModuleDescriptor::Kind::bundle:
      for (const auto& f : d.fibers()) out.push_back({false, f});
      break;
    case ModuleDescriptor::Kind::matrix_self:
      out.push_back({true, std::nullopt});
      break;
    case ModuleDescriptor::Kind::direct_sum:
      for (const auto& p : d.parts()) collect_kinds(p, out);
      break;
    case ModuleDescriptor::Kind::transported:
      collect_kinds(d.base(), out);
      break;
  }
}

std::vector<BlockKind> block_kinds(const ModuleDescriptor& d) {
  std::vector<BlockKind> out;
  collect_kinds(d, out);
  return out;
}

bool has_fault(const ModuleDescriptor& d) {
  if (d.fault() != FaultMode::none) return true;
  return std::any_of(d.parts().begin(), d.parts().end(), [](const ModuleDescriptor& p) { return has_fault(p); });
}

Real block_norm(const BlockKind& kind, const Matrix& b) {
  if (kind.matrix) {
    if (b.size() == 1) return std::abs(b(0, 0));
    Eigen::SelfAdjointEigenSolver<Matrix> es(b.adjoint() * b, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  if (kind.space->kind() == SipSpace::Kind::hilbert) return b.norm();
  return detail::lp_norm(b, kind.space->p());
}

// |||x + a y||| for a fixed pair. Unfaulted modules have |||z||| equal to the
// largest blockwise norm, which avoids building [z, z]; faulted descriptors go
// through the generic path.
class NormOfPencil {
 public:
  NormOfPencil(const ModuleElement& x, const ModuleElement& y) : x_(x), y_(y), fast_(!has_fault(x.descriptor())) {
    if (fast_) {
      kinds_ = block_kinds(x.descriptor());
      scratch_.reserve(x.blocks().size());
      for (const auto& b : x.blocks()) scratch_.emplace_back(b.rows(), b.cols());
    }
  }

  Real operator()(Complex alpha) {
    if (!fast_) return triple_norm(axpy(x_, alpha, y_));
    Real best = 0;
    for (std::size_t i = 0; i < scratch_.size(); ++i) {
      scratch_[i].noalias() = x_.block(i) + alpha * y_.block(i);
      best = std::max(best, block_norm(kinds_[i], scratch_[i]));
    }
    return best;
  }

 private:
  const ModuleElement& x_;
  const ModuleElement& y_;
  bool fast_;
  std::vector<BlockKind> kinds_;
  std::vector<Matrix> scratch_;
};

bool all_finite(const ModuleElement& x) {
  return std::all_of(x.blocks().begin(), x.blocks().end(), [](const Matrix& b) { return b.allFinite(); });
}

Matrix complement_block(const BlockKind& kind, const Matrix& xb, Rng& rng, const NumericPolicy& policy) {
  Matrix g = random_matrix(rng, xb.rows(), xb.cols());
  if (kind.matrix) {
    // [x, y] = x* y vanishes iff the columns of y are orthogonal to range(x).
    Eigen::JacobiSVD<Matrix> svd(xb, Eigen::ComputeFullU);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0) return g;
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > policy.tol_eq * s(0)) ++rank;
    if (rank == xb.rows()) return Matrix::Zero(xb.rows(), xb.cols());
    const Matrix u = svd.matrixU().leftCols(rank);
    return g - u * (u.adjoint() * g);
  }
  const Vector w = giles_weights(*kind.space, xb.col(0));
  const Real ww = w.squaredNorm();
  if (ww == 0) return g;
  if (xb.rows() == 1) return Matrix::Zero(1, 1);
  return g - w * (w.dot(g.col(0)) / ww);
}

Json pair_witness(const ModuleElement& x, const ModuleElement& y) { return {{"x", to_json(x)}, {"y", to_json(y)}}; }

// Replaces square matrix blocks of x by products of n x (n-1) and (n-1) x n
// factors, so the complement sampler has a nontrivial kernel to work with.
ModuleElement rank_deficient_variant(const ModuleElement& x, Rng& rng) {
  const auto kinds = block_kinds(x.descriptor());
  std::vector<Matrix> blocks = x.blocks();
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (!kinds[i].matrix || blocks[i].rows() < 2) continue;
    const auto n = blocks[i].rows();
    blocks[i] = random_matrix(rng, n, n - 1) * random_matrix(rng, n - 1, n);
  }
  return {x.descriptor_ptr(), std::move(blocks)};
}

}  // namespace

Real orthogonality_tolerance(Real base_norm) { return 1e-7 * (1 + base_norm); }

BJResult bj_minimize(const ModuleElement& x, const ModuleElement& y, const NumericPolicy& policy) {
  if (!x.same_module(y)) throw StructuralError("bj_minimize: elements belong to different modules");
  if (!all_finite(x) || !all_finite(y)) throw DomainError("bj_minimize: non-finite input");

  NormOfPencil f(x, y);
  BJResult r;
  r.base_norm = f(0.0);
  r.min_norm = r.base_norm;
  const Real ny = triple_norm(y);
  if (ny == 0) return r;

  const Real radius = 2 * r.base_norm / ny + 1;
  auto consider = [&](Complex alpha) {
    const Real v = f(alpha);
    if (v < r.min_norm) {
      r.min_norm = v;
      r.alpha_star = alpha;
    }
  };
  for (int k = 0; k < 16; ++k) {
    const Real rad = radius * std::pow(10.0, -4.0 + 4.0 * k / 15.0);
    for (int j = 0; j < 24; ++j) consider(std::polar(rad, 2 * kPi * j / 24));
  }

  // The partial minimum over Im a of a jointly convex function is convex in
  // Re a, so nested one-dimensional Brent searches find the global minimum.
  const int bits = std::clamp(static_cast<int>(std::ceil(1 - std::log2(std::max(policy.tol_opt, 1e-15)))), 8, 52);
  const std::uintmax_t max_iter = 200;
  auto inner = [&](Real re) {
    std::uintmax_t it = max_iter;
    return boost::math::tools::brent_find_minima([&](Real im) { return f(Complex(re, im)); }, -radius, radius, bits,
                                                 it);
  };
  std::uintmax_t it = max_iter;
  const auto outer = boost::math::tools::brent_find_minima([&](Real re) { return inner(re).second; }, -radius, radius,
                                                           bits, it);
  consider(Complex(outer.first, inner(outer.first).first));

  r.is_orthogonal = r.min_norm >= r.base_norm - orthogonality_tolerance(r.base_norm);
  return r;
}

bool thm31_check(const ModuleElement& x, const ModuleElement& y, const NumericPolicy& policy) {
  const Real bound = policy.tol_eq * (1 + triple_norm(x) * triple_norm(y));
  if (cstar_norm(csip(x, y)) > bound) throw PreconditionError("thm31_check: [x, y] is not zero");
  return bj_minimize(x, y, policy).is_orthogonal;
}

ModuleElement sip_orthogonal_complement_sample(const ModuleElement& x, std::uint64_t seed,
                                               const NumericPolicy& policy) {
  if (x.is_zero()) throw DomainError("sip_orthogonal_complement_sample: x is zero");
  const auto kinds = block_kinds(x.descriptor());
  Rng rng(seed);
  std::vector<Matrix> blocks;
  blocks.reserve(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i) blocks.push_back(complement_block(kinds[i], x.block(i), rng, policy));
  return {x.descriptor_ptr(), std::move(blocks)};
}

std::vector<Real> default_continuity_grid() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

bool continuity_check(const ModuleElement& x, const ModuleElement& y, const std::vector<Real>& t_grid,
                      const NumericPolicy& policy) {
  (void)policy;
  if (t_grid.size() < 3 || !(t_grid.back() <= 1e-4)) return false;
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] < t_grid[i - 1]) || !(t_grid[i] > 0)) return false;

  const Real scale = 1 + triple_norm(x) * triple_norm(y);
  const AlgebraElement base = re(csip(x, y));
  std::vector<Real> delta;
  for (Real t : t_grid) delta.push_back(cstar_norm(sub(re(csip(axpy(x, t, y), y)), base)));
  const Real slack = 1e-12 * scale;
  for (std::size_t i = t_grid.size() / 2; i + 1 < delta.size(); ++i)
    if (delta[i + 1] > delta[i] + slack) return false;
  return delta.back() <= 1e-4 * scale;
}

bool continuity_check(const ModuleElement& x, const ModuleElement& y, const NumericPolicy& policy) {
  return continuity_check(x, y, default_continuity_grid(), policy);
}

bool thm34_hypothesis(const ModuleElement& x, const ModuleElement& y, Real t, const NumericPolicy& policy) {
  const AlgebraElement xy = csip(x, y);
  if (cstar_norm(sub(xy, star(xy))) > policy.tol_eq * (1 + triple_norm(x) * triple_norm(y)))
    throw PreconditionError("thm34_hypothesis: [x, y] is not self-adjoint");
  const ModuleElement z = axpy(x, t, y);
  const AlgebraElement lhs = scalar_mul(triple_norm(z), rho(x, policy));
  return leq(lhs, csip(z, z), policy);
}

std::vector<Real> thm34_default_grid(const ModuleElement& x, const ModuleElement& y) {
  std::vector<Real> base;
  for (int k = -6; k <= 2; ++k) base.push_back(std::pow(10.0, k / 2.0));
  std::vector<Real> grid{0.0};
  const Real nx = triple_norm(x);
  const Real ny = triple_norm(y);
  std::vector<Real> scales{1.0};
  if (nx > 0 && ny > 0) scales.push_back(nx / ny);
  for (Real s : scales)
    for (Real v : base) {
      grid.push_back(s * v);
      grid.push_back(-s * v);
    }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

VerificationReport thm34_check(const ModuleElement& x, const ModuleElement& y, const std::vector<Real>& t_grid,
                               const NumericPolicy& policy) {
  VerificationReport r("self-adjoint-converse", x.descriptor().label(), 1e-3);
  for (Real t : t_grid) {
    if (!thm34_hypothesis(x, y, t, policy)) {
      r.skip();
      r.note = "hypothesis not satisfied (vacuous)";
      return r;
    }
  }
  const Real value = cstar_norm(csip(x, y)) / (1 + triple_norm(x) * triple_norm(y));
  r.record(-value, [&] { return pair_witness(x, y); });
  return r;
}

std::vector<VerificationReport> verify_orthogonality(const ModuleDescriptor& desc, int sample_count,
                                                     std::uint64_t seed, const NumericPolicy& policy) {
  const auto module = std::make_shared<const ModuleDescriptor>(desc);
  const std::string label = desc.label();

  VerificationReport implication("sip-orthogonal-implies-bj", label, 1e-7);
  VerificationReport convexity("bj-objective-convexity", label, policy.tol_eq);
  VerificationReport scale("bj-scale-invariance", label, 0.0);
  VerificationReport continuity("continuity", label, 0.0);

  for (int trial = 0; trial < sample_count; ++trial) {
    Rng rng(seed, "orthogonality/" + label, static_cast<std::uint64_t>(trial));
    ModuleElement x = scalar_mul(std::exp(rng.normal()), random_module_element(rng, module));
    if (trial % 2 == 0) x = rank_deficient_variant(x, rng);
    const ModuleElement y = scalar_mul(std::exp(rng.normal()),
                                       sip_orthogonal_complement_sample(x, mix_seed(seed, label, trial), policy));

    const BJResult bj = bj_minimize(x, y, policy);
    implication.record((bj.min_norm - bj.base_norm) / (1 + bj.base_norm), [&] {
      Json w = pair_witness(x, y);
      w["bj"] = to_json(bj);
      return w;
    });

    const ModuleElement v = random_module_element(rng, module);
    {
      NormOfPencil f(x, v);
      const Complex a1 = 2.0 * rng.complex_normal();
      const Complex a2 = 2.0 * rng.complex_normal();
      const Real theta = rng.uniform();
      const Real mid = f(theta * a1 + (1 - theta) * a2);
      const Real chord = theta * f(a1) + (1 - theta) * f(a2);
      convexity.record((chord - mid) / (1 + chord), [&] { return pair_witness(x, v); });
    }

    if (trial % 4 == 0) {
      const ModuleElement& w = (trial % 8 == 0) ? y : v;
      const Complex lambda = std::exp(rng.normal()) * rng.complex_normal();
      const bool a = bj_minimize(x, w, policy).is_orthogonal;
      const bool b = bj_minimize(x, scalar_mul(lambda, w), policy).is_orthogonal;
      scale.record(a == b ? 0.0 : -1.0, [&] { return pair_witness(x, w); });
    }

    continuity.record(continuity_check(x, v, policy) ? 0.0 : -1.0, [&] { return pair_witness(x, v); });
  }
  return {implication, convexity, scale, continuity};
}

VerificationReport verify_thm34(const ModuleDescriptor& desc, int sample_count, std::uint64_t seed,
                                const NumericPolicy& policy) {
  const auto module = std::make_shared<const ModuleDescriptor>(desc);
  const auto kinds = block_kinds(desc);
  const std::string label = desc.label();
  VerificationReport total("self-adjoint-converse", label, 1e-3);

  for (int trial = 0; trial < sample_count; ++trial) {
    Rng rng(seed, "thm34/" + label, static_cast<std::uint64_t>(trial));
    ModuleElement x = ModuleElement::zero(module);
    ModuleElement y = x;
    if (trial % 2 == 0) {
      std::tie(x, y) = random_self_adjoint_pair(rng, module);
    } else {
      // [x, x] = c^2 1, y = (complement of x) + x h with h self-adjoint, so
      // [x, y] = c^2 h is self-adjoint and nonzero unless h = 0.
      const Real c = std::exp(rng.normal());
      std::vector<Matrix> blocks;
      for (std::size_t i = 0; i < kinds.size(); ++i) {
        const auto [rows, cols] = desc.block_shape(static_cast<int>(i));
        if (kinds[i].matrix) {
          blocks.push_back(c * random_unitary(rng, rows));
        } else {
          Matrix v = random_matrix(rng, rows, cols);
          if (trial % 4 == 1) v = v.real().cast<Complex>();
          blocks.push_back(v * (c / block_norm(kinds[i], v)));
        }
      }
      x = ModuleElement(module, std::move(blocks));
      const ModuleElement perp = sip_orthogonal_complement_sample(x, mix_seed(seed, label, trial), policy);
      AlgebraElement h = random_self_adjoint(rng, module->algebra_ptr());
      if (trial % 4 == 3) h = scalar_mul(0.0, h);
      y = add(perp, module_action(x, h));
      const AlgebraElement xy = csip(x, y);
      if (cstar_norm(sub(xy, star(xy))) > policy.tol_eq * (1 + triple_norm(x) * triple_norm(y)))
        y = scalar_mul(0.0, y);
    }
    total.absorb(thm34_check(x, y, thm34_default_grid(x, y), policy));
  }
  total.note = std::to_string(total.skipped) + " of " + std::to_string(sample_count) +
               " pairs vacuous (hypothesis not satisfied at some t)";
  return total;
}

WitnessSearch search_bj_converse_witness(const ModuleDescriptor& desc, int trials, std::uint64_t seed,
                                         Real threshold, const NumericPolicy& policy) {
  WitnessSearch s;
  if (!desc.algebra().is_commutative()) {
    s.applicable = false;
    s.note = "search needs a commutative algebra";
    return s;
  }
  // Over more than one point even Hilbert bundles have such pairs: take y
  // orthogonal to x where x peaks and arbitrary elsewhere.
  if (desc.is_hilbert() && desc.algebra().self_adjoint_dimension() == 1)
    s.note = "Hilbert module over a one-point set: no counterexample expected";
  const auto module = std::make_shared<const ModuleDescriptor>(desc);
  const auto kinds = block_kinds(desc);
  const std::string label = desc.label();

  for (int trial = 0; trial < trials; ++trial) {
    ++s.trials_used;
    Rng rng(seed, "bj-converse/" + label, static_cast<std::uint64_t>(trial));
    const ModuleElement x = random_module_element(rng, module);
    // Orthogonal to x on the blocks that attain |||x|||, unconstrained elsewhere.
    std::vector<Real> norms;
    for (std::size_t i = 0; i < kinds.size(); ++i) norms.push_back(block_norm(kinds[i], x.block(i)));
    const Real top = *std::max_element(norms.begin(), norms.end());
    std::vector<Matrix> blocks;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      if (norms[i] >= top * (1 - 1e-9))
        blocks.push_back(complement_block(kinds[i], x.block(i), rng, policy));
      else
        blocks.push_back(random_matrix(rng, x.block(i).rows(), x.block(i).cols()));
    }
    const ModuleElement y(module, std::move(blocks));
    const Real ny = triple_norm(y);
    if (ny == 0) continue;
    const Real ratio = cstar_norm(csip(x, y)) / (triple_norm(x) * ny);
    if (!(ratio > threshold)) continue;
    const BJResult bj = bj_minimize(x, y, policy);
    if (!bj.is_orthogonal) continue;
    s.found = true;
    s.value = ratio;
    s.witness = {{"construction", to_json(desc)}, {"x", to_json(x)}, {"y", to_json(y)}, {"bj", to_json(bj)},
                 {"ratio", ratio}};
    return s;
  }
  return s;
}

WitnessSearch search_hermitian_defect_witness(const ModuleDescriptor& desc, int trials, std::uint64_t seed,
                                              Real threshold) {
  WitnessSearch s;
  if (desc.is_hilbert()) s.note = "Hilbert module: no counterexample expected";
  const auto module = std::make_shared<const ModuleDescriptor>(desc);
  const std::string label = desc.label();
  for (int trial = 0; trial < trials; ++trial) {
    ++s.trials_used;
    Rng rng(seed, "hermitian-defect/" + label, static_cast<std::uint64_t>(trial));
    ModuleElement x = random_module_element(rng, module);
    ModuleElement y = random_module_element(rng, module);
    const Real nx = triple_norm(x);
    const Real ny = triple_norm(y);
    if (nx == 0 || ny == 0) continue;
    x = scalar_mul(1 / nx, x);
    y = scalar_mul(1 / ny, y);
    const Real defect = hermitian_defect(x, y);
    if (!(defect > threshold)) continue;
    s.found = true;
    s.value = defect;
    s.witness = {{"construction", to_json(desc)}, {"x", to_json(x)}, {"y", to_json(y)}, {"defect", defect}};
    return s;
  }
  return s;
}

nlohmann::json to_json(const BJResult& r) {
  return {{"alpha_star", complex_to_json(r.alpha_star)},
          {"min_norm", r.min_norm},
          {"base_norm", r.base_norm},
          {"is_orthogonal", r.is_orthogonal}};
}

}  // namespace csip
