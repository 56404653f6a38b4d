#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"

#include "csip/json_io.hpp"
#include "csip/orthogonality.hpp"
#include "csip/random.hpp"
#include "test_util.hpp"

namespace csip {
using namespace test;

namespace {

using MD = ModuleDescriptor;

const MD kL3 = MD::bundle({SipSpace::lp(2, 3)});

Real l3(Complex a, Complex b) { return std::cbrt(std::pow(std::abs(a), 3) + std::pow(std::abs(b), 3)); }

// Brute-force polar grid over complex alpha, independent of the library optimizer.
Real grid_min(const std::function<Real(Complex)>& f, Real radius) {
  Real best = f(0);
  for (int r = 1; r <= 400; ++r)
    for (int k = 0; k < 360; ++k) best = std::min(best, f(std::polar(radius * r / 400, 2 * M_PI * k / 360)));
  return best;
}

}  // namespace

TEST_CASE("bj_minimize on Hilbert-orthogonal vectors") {
  const MD h2 = MD::bundle({SipSpace::hilbert(2)});
  const BJResult r = bj_minimize(elem(h2, {col({1, 0})}), elem(h2, {col({0, 1})}));
  CHECK(std::abs(r.alpha_star) < 1e-6);
  CHECK(r.min_norm == doctest::Approx(1));
  CHECK(r.base_norm == doctest::Approx(1));
  CHECK(r.is_orthogonal);
}

TEST_CASE("l^3 pair that is not BJ-orthogonal") {
  const auto x = elem(kL3, {col({1, 1})});
  const auto y = elem(kL3, {col({1, 0})});
  const BJResult r = bj_minimize(x, y);

  // Oracle: ||(1 + a, 1)||_3 >= 1 with equality only at a = -1.
  const Real oracle = grid_min([](Complex a) { return l3(1.0 + a, 1.0); }, 4);
  CHECK(oracle == doctest::Approx(1).epsilon(1e-4));
  CHECK(r.min_norm == doctest::Approx(1).epsilon(1e-8));
  CHECK(std::abs(r.alpha_star - Complex(-1, 0)) < 1e-4);
  CHECK(r.base_norm == doctest::Approx(std::cbrt(2.0)));
  CHECK_FALSE(r.is_orthogonal);
}

TEST_CASE("l^3 s.i.p.-orthogonal pair is BJ-orthogonal") {
  const auto x = elem(kL3, {col({1, 1})});
  const auto y = elem(kL3, {col({1, -1})});
  CHECK(cstar_norm(csip(x, y)) < 1e-15);
  CHECK(thm31_check(x, y));
  const Real oracle = grid_min([](Complex a) { return l3(1.0 + a, 1.0 - a); }, 4);
  CHECK(oracle == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));
  CHECK(bj_minimize(x, y).min_norm == doctest::Approx(std::cbrt(2.0)).epsilon(1e-9));
}

TEST_CASE("zero x is orthogonal to everything") {
  const auto zero = ModuleElement::zero(kL3);
  const auto y = elem(kL3, {col({1, 2})});
  const BJResult r = bj_minimize(zero, y);
  CHECK(r.is_orthogonal);
  CHECK(r.base_norm == 0);
  CHECK(thm31_check(zero, y));
}

TEST_CASE("thm31_check rejects pairs with [x, y] != 0") {
  CHECK_THROWS_AS(thm31_check(elem(kL3, {col({1, 1})}), elem(kL3, {col({1, 0})})), PreconditionError);
  const MD h1 = MD::bundle({SipSpace::hilbert(1)});
  CHECK_THROWS_AS(bj_minimize(elem(h1, {col({1})}), elem(kL3, {col({1, 0})})), StructuralError);
}

TEST_CASE("fiberwise orthogonal Hilbert sections") {
  const MD h = MD::bundle({SipSpace::hilbert(2), SipSpace::hilbert(2)});
  CHECK(thm31_check(elem(h, {col({1, 0}), col({0, 3})}), elem(h, {col({0, 2}), col({1, 0})})));
}

TEST_CASE("complement samples") {
  const MD h2 = MD::bundle({SipSpace::hilbert(2)});
  const auto y = sip_orthogonal_complement_sample(elem(h2, {col({1, 0})}), 7);
  CHECK(std::abs(y.block(0)(0, 0)) < 1e-15);
  CHECK(std::abs(y.block(0)(1, 0)) > 0);

  // Kernel of the Giles functional of (1, 1) is span{(1, -1)}.
  const auto z = sip_orthogonal_complement_sample(elem(kL3, {col({1, 1})}), 7);
  CHECK(std::abs(z.block(0)(0, 0) + z.block(0)(1, 0)) < 1e-14);
  CHECK(std::abs(z.block(0)(0, 0)) > 0);

  CHECK_THROWS_AS(sip_orthogonal_complement_sample(ModuleElement::zero(kL3), 1), DomainError);

  Rng rng(4);
  for (const MD& d : {MD::bundle({SipSpace::lp(3, 1.5), SipSpace::hilbert(2)}), MD::matrix_self(3)}) {
    for (int i = 0; i < 20; ++i) {
      const auto x = random_module_element(rng, std::make_shared<const MD>(d));
      const auto w = sip_orthogonal_complement_sample(x, i);
      CHECK(cstar_norm(csip(x, w)) <= 1e-9 * (1 + triple_norm(x) * triple_norm(w)));
    }
  }
}

TEST_CASE("continuity examples") {
  Rng rng(12);
  const MD h = MD::bundle({SipSpace::hilbert(2), SipSpace::hilbert(3)});
  const auto hp = std::make_shared<const MD>(h);
  const auto lp = std::make_shared<const MD>(MD::bundle({SipSpace::lp(2, 3), SipSpace::lp(2, 3)}));
  for (int i = 0; i < 20; ++i) {
    const auto x = random_module_element(rng, hp), y = random_module_element(rng, hp);
    CHECK(continuity_check(x, y));
    // Hilbert fibers: delta(t) = t [y, y] exactly.
    const Real t = 1e-3;
    const Real delta = cstar_norm(sub(re(csip(axpy(x, t, y), y)), re(csip(x, y))));
    CHECK(delta == doctest::Approx(t * cstar_norm(csip(y, y))).epsilon(1e-8));

    const auto u = random_module_element(rng, lp), v = random_module_element(rng, lp);
    CHECK(continuity_check(u, v));
  }
  const auto x = random_module_element(rng, hp), y = random_module_element(rng, hp);
  CHECK_FALSE(continuity_check(x, y, std::vector<Real>{10.0}));
  CHECK_FALSE(continuity_check(x, y, std::vector<Real>{1e-1, 1e-2}));
}

TEST_CASE("thm34 hypothesis examples") {
  const MD h1 = MD::bundle({SipSpace::hilbert(1)});
  const auto zero = ModuleElement::zero(h1);
  for (Real t : {-3.0, 0.0, 0.5}) {
    CHECK(thm34_hypothesis(elem(h1, {col({1})}), zero, t));
    CHECK(thm34_hypothesis(elem(h1, {col({2})}), zero, t));
  }
  // [x,x] = (4) and |||x||| rho(x) = 2 (2): equality.
  const auto x2 = elem(h1, {col({2})});
  CHECK(payload_gap(scalar_mul(triple_norm(x2), rho(x2)), csip(x2, x2)) < 1e-14);

  // Fiber norms 1 and 2: at the first point 1 < 2 * 1.
  const MD h11 = MD::bundle({SipSpace::hilbert(1), SipSpace::hilbert(1)});
  const auto uneven = elem(h11, {col({1}), col({2})});
  CHECK_FALSE(thm34_hypothesis(uneven, ModuleElement::zero(h11), 0));

  CHECK_THROWS_AS(thm34_hypothesis(elem(h1, {col({1})}), elem(h1, {col({Complex(0, 1)})}), 0.1), PreconditionError);
}

TEST_CASE("thm34_check on scalar sections") {
  const MD h1 = MD::bundle({SipSpace::hilbert(1)});
  const auto x = elem(h1, {col({1})});

  // Grid over real y: only y = 0 survives the hypothesis at every t.
  for (int k = -20; k <= 20; ++k) {
    const Real s = k / 10.0;
    const auto y = elem(h1, {col({s})});
    const VerificationReport r = thm34_check(x, y, thm34_default_grid(x, y));
    CHECK(r.passed());
    if (k == 0) {
      CHECK(r.trials == 1);
    } else {
      CHECK(r.skipped == 1);
      CHECK(r.note.find("vacuous") != std::string::npos);
    }
  }

  const auto zero = ModuleElement::zero(h1);
  const VerificationReport z = thm34_check(zero, x, thm34_default_grid(zero, x));
  CHECK(z.trials == 1);
  CHECK(z.passed());
}

TEST_CASE("thm34 default grid is symmetric and contains zero") {
  const auto x = elem(kL3, {col({1, 1})});
  const auto y = elem(kL3, {col({3, 0})});
  const auto g = thm34_default_grid(x, y);
  CHECK(std::find(g.begin(), g.end(), 0.0) != g.end());
  for (Real t : g) CHECK(std::find(g.begin(), g.end(), -t) != g.end());
  CHECK(g.front() <= -10);
  CHECK(g.back() >= 10);
}

TEST_CASE("single-fiber Hilbert sanity: BJ-orthogonal means inner-product orthogonal") {
  const auto p = std::make_shared<const MD>(MD::bundle({SipSpace::hilbert(3)}));
  Rng rng(77);
  for (int i = 0; i < 50; ++i) {
    const auto x = random_module_element(rng, p);
    const auto y = random_module_element(rng, p);
    const Complex c = csip(x, y).block(0)(0, 0) / csip(x, x).block(0)(0, 0);
    const auto perp = axpy(y, -c, x);
    CHECK(bj_minimize(x, perp).is_orthogonal);
    for (const auto& w : {y, perp}) {
      if (bj_minimize(x, w).is_orthogonal)
        CHECK(cstar_norm(csip(x, w)) <= 1e-6 * triple_norm(x) * triple_norm(w));
    }
  }
}

TEST_CASE("property: the orthogonality decision is scale invariant and the objective convex") {
  Rng rng(91);
  for (const MD& d : {MD::bundle({SipSpace::lp(2, 3), SipSpace::lp(2, 3)}), MD::matrix_self(2)}) {
    const auto p = std::make_shared<const MD>(d);
    for (int i = 0; i < 30; ++i) {
      const auto x = random_module_element(rng, p);
      const auto y = i % 2 ? random_module_element(rng, p) : sip_orthogonal_complement_sample(x, i);
      const Complex lam = 3.0 * rng.complex_normal();
      CHECK(bj_minimize(x, y).is_orthogonal == bj_minimize(x, scalar_mul(lam, y)).is_orthogonal);

      const Complex a1 = 2.0 * rng.complex_normal(), a2 = 2.0 * rng.complex_normal();
      const Real th = rng.uniform();
      const Real mid = triple_norm(axpy(x, th * a1 + (1 - th) * a2, y));
      CHECK(mid <= th * triple_norm(axpy(x, a1, y)) + (1 - th) * triple_norm(axpy(x, a2, y)) + 1e-9);

      const BJResult r = bj_minimize(x, y);
      CHECK(r.min_norm <= r.base_norm + 1e-8);
    }
  }
}

TEST_CASE("suite verifiers pass") {
  for (const MD& d : {MD::bundle({SipSpace::lp(2, 3), SipSpace::lp(2, 3)}), MD::matrix_self(2),
                      MD::direct_sum({MD::bundle({SipSpace::hilbert(2)}), MD::matrix_self(2)})}) {
    CAPTURE(d.label());
    for (const auto& r : verify_orthogonality(d, 40, 3)) CHECK(r.passed());
    const VerificationReport t = verify_thm34(d, 40, 3);
    CHECK(t.passed());
    CHECK(t.trials + t.skipped == 40);
  }
}

TEST_CASE("converse witnesses on l^3 re-verify from their JSON") {
  const MD d = MD::bundle({SipSpace::lp(2, 3), SipSpace::lp(2, 3)});
  const WitnessSearch bj = search_bj_converse_witness(d, 1000, 42);
  REQUIRE(bj.found);
  const auto x = module_element_from_json(bj.witness["x"]);
  const auto y = module_element_from_json(bj.witness["y"]);
  CHECK(bj_minimize(x, y).is_orthogonal);
  CHECK(cstar_norm(csip(x, y)) > 0.1 * triple_norm(x) * triple_norm(y));

  const WitnessSearch hd = search_hermitian_defect_witness(d, 1000, 42);
  REQUIRE(hd.found);
  CHECK(hermitian_defect(module_element_from_json(hd.witness["x"]), module_element_from_json(hd.witness["y"])) > 0.1);
}

TEST_CASE("Hilbert bundles: no Hermitian defect; converse witnesses only over several points") {
  const MD one = MD::bundle({SipSpace::hilbert(2)});
  const WitnessSearch s = search_bj_converse_witness(one, 200, 1);
  CHECK_FALSE(s.found);
  CHECK(s.note.find("no counterexample expected") != std::string::npos);
  CHECK_FALSE(search_hermitian_defect_witness(one, 200, 1).found);

  // Two points: y is orthogonal to x where x peaks, free elsewhere.
  const MD two = MD::bundle({SipSpace::hilbert(2), SipSpace::hilbert(2)});
  const auto x = elem(two, {col({1, 0}), col({0.5, 0})});
  const auto y = elem(two, {col({0, 1}), col({1, 0})});
  CHECK(bj_minimize(x, y).is_orthogonal);
  CHECK(cstar_norm(csip(x, y)) == doctest::Approx(0.5));
  CHECK(cstar_norm(csip(x, y)) > 0.1 * triple_norm(x) * triple_norm(y));

  CHECK_FALSE(search_bj_converse_witness(MD::matrix_self(2), 10, 1).applicable);
}

TEST_CASE("BJResult JSON layout") {
  const auto j = to_json(bj_minimize(elem(kL3, {col({1, 1})}), elem(kL3, {col({1, 0})})));
  CHECK(j["alpha_star"].is_array());
  CHECK(j["alpha_star"].size() == 2);
  CHECK(j["min_norm"].is_number());
  CHECK(j["base_norm"].is_number());
  CHECK(j["is_orthogonal"] == false);
}

}  // namespace csip
