#include <cmath>
#include <random>

#include "doctest.h"

#include "csip/harness.hpp"
#include "csip/module.hpp"
#include "csip/module_checks.hpp"
#include "csip/random.hpp"
#include "test_util.hpp"

namespace csip {
using namespace test;

namespace {

using MD = ModuleDescriptor;

const VerificationReport& find(const std::vector<VerificationReport>& rs, const std::string& property) {
  for (const auto& r : rs)
    if (r.property == property) return r;
  FAIL("missing report " << property);
  return rs.front();
}

bool all_pass(const std::vector<VerificationReport>& rs) {
  bool ok = true;
  for (const auto& r : rs) {
    if (!r.passed()) {
      MESSAGE(r.property << " failed on " << r.construction << " worst " << r.worst_margin);
      ok = false;
    }
  }
  return ok;
}

}  // namespace

TEST_CASE("csip examples") {
  const MD h22 = MD::bundle({SipSpace::hilbert(2), SipSpace::hilbert(2)});
  const auto f = elem(h22, {col({1, 0}), col({0, 1})});
  const auto g = elem(h22, {col({0, 1}), col({0, 2})});
  CHECK(payload_gap(csip(f, g), fn({0, 2})) == 0);

  const MD m2 = MD::matrix_self(2);
  const Matrix a = mat({{1, 2}, {Complex(0, 3), -1}});
  CHECK(payload_gap(csip(elem(m2, {Matrix::Identity(2, 2)}), elem(m2, {a})), mx(a)) == 0);

  const MD l3 = MD::bundle({SipSpace::lp(2, 3)});
  const AlgebraElement v = csip(elem(l3, {col({1, 1})}), elem(l3, {col({1, 0})}));
  CHECK(v.block(0)(0, 0).real() == doctest::Approx(std::pow(2.0, -1.0 / 3)).epsilon(1e-14));
}

TEST_CASE("module_action examples") {
  const MD h22 = MD::bundle({SipSpace::hilbert(2), SipSpace::hilbert(2)});
  const auto f = elem(h22, {col({1, 0}), col({0, 1})});
  CHECK(payload_gap(module_action(f, fn({2, 0})), elem(h22, {col({2, 0}), col({0, 0})})) == 0);

  const MD m2 = MD::matrix_self(2);
  const auto x = elem(m2, {mat({{1, 2}, {3, 4}})});
  CHECK(payload_gap(module_action(x, AlgebraElement::one(m2.algebra())), x) == 0);

  // Direct sums act part by part.
  const MD sum = MD::direct_sum({MD::bundle({SipSpace::hilbert(1)}), m2});
  const auto s = elem(sum, {col({2}), mat({{1, 0}, {0, 1}})});
  const AlgebraElement a(sum.algebra(), {col({3}), mat({{0, 1}, {1, 0}})});
  CHECK(payload_gap(module_action(s, a), elem(sum, {col({6}), mat({{0, 1}, {1, 0}})})) == 0);

  CHECK_THROWS_AS(module_action(f, fn({1, 2, 3})), StructuralError);
}

TEST_CASE("triple_norm and rho examples") {
  const MD h11 = MD::bundle({SipSpace::hilbert(1), SipSpace::hilbert(1)});
  const auto f = elem(h11, {col({3}), col({4})});
  // [f,f] = (9, 16), sup-norm 16.
  CHECK(triple_norm(f) == doctest::Approx(4));
  CHECK(payload_gap(rho(f), fn({3, 4})) < 1e-15);
  CHECK(triple_norm(ModuleElement::zero(h11)) == 0);
  CHECK(payload_gap(rho(ModuleElement::zero(h11)), fn({0, 0})) == 0);

  const MD m2 = MD::matrix_self(2);
  CHECK(triple_norm(elem(m2, {Matrix::Identity(2, 2)})) == doctest::Approx(1));
  CHECK(payload_gap(rho(elem(m2, {diag({2, 0})})), mx(diag({2, 0}))) < 1e-15);
}

TEST_CASE("hermitian_defect examples") {
  const MD l3 = MD::bundle({SipSpace::lp(2, 3)});
  const Real d = hermitian_defect(elem(l3, {col({1, 1})}), elem(l3, {col({1, 0})}));
  CHECK(d == doctest::Approx(std::abs(std::pow(2.0, -1.0 / 3) - 1)).epsilon(1e-12));
  CHECK(d == doctest::Approx(0.2063).epsilon(1e-3));

  Rng rng(5);
  for (const MD& m : {MD::bundle({SipSpace::hilbert(3), SipSpace::hilbert(2)}), MD::matrix_self(3)}) {
    const auto p = std::make_shared<const MD>(m);
    for (int i = 0; i < 50; ++i) {
      const auto x = random_module_element(rng, p), y = random_module_element(rng, p);
      CHECK(hermitian_defect(x, y) <= 1e-9 * (1 + triple_norm(x) * triple_norm(y)));
    }
  }
}

TEST_CASE("direct sum csip is the tuple of part csips and the norm is their max") {
  const MD a = MD::bundle({SipSpace::lp(2, 3), SipSpace::hilbert(1)});
  const MD b = MD::matrix_self(2);
  const MD sum = MD::direct_sum({a, b});
  Rng rng(8);
  for (int i = 0; i < 30; ++i) {
    const auto xa = random_module_element(rng, std::make_shared<const MD>(a));
    const auto xb = random_module_element(rng, std::make_shared<const MD>(b));
    const auto ya = random_module_element(rng, std::make_shared<const MD>(a));
    const auto yb = random_module_element(rng, std::make_shared<const MD>(b));
    std::vector<Matrix> xs = xa.blocks(), ys = ya.blocks();
    xs.push_back(xb.block(0));
    ys.push_back(yb.block(0));
    const auto x = elem(sum, xs), y = elem(sum, ys);
    const AlgebraElement v = csip(x, y);
    const AlgebraElement va = csip(xa, ya);
    const AlgebraElement vb = csip(xb, yb);
    CHECK((v.block(0) - va.block(0)).norm() == 0);
    CHECK((v.block(1) - vb.block(0)).norm() == 0);
    CHECK(triple_norm(x) == doctest::Approx(std::max(triple_norm(xa), triple_norm(xb))).epsilon(1e-14));
  }
}

TEST_CASE("transport applies psi to csip and psi^-1 inside the action") {
  const MD base = MD::bundle({SipSpace::lp(2, 3), SipSpace::lp(2, 3)});
  const MD t = MD::transported(base, IsoDescriptor::permute({1, 0}));
  const auto x = elem(t, {col({1, 1}), col({2, 0})});
  const auto y = elem(t, {col({1, 0}), col({0, 1})});
  const auto xb = elem(base, x.blocks()), yb = elem(base, y.blocks());
  const AlgebraElement vb = csip(xb, yb);
  const AlgebraElement v = csip(x, y);
  CHECK(v.block(0)(0, 0) == vb.block(0)(1, 0));
  CHECK(v.block(0)(1, 0) == vb.block(0)(0, 0));
  CHECK(triple_norm(x) == doctest::Approx(triple_norm(xb)));

  // x . (5, 7) in the transport scales the fibers by psi^-1(5, 7) = (7, 5).
  const auto xa = module_action(x, fn({5, 7}));
  CHECK(payload_gap(xa, elem(t, {col({7, 7}), col({10, 0})})) == 0);

  CHECK_THROWS_AS(IsoDescriptor::permute({0, 0}), StructuralError);
  CHECK_THROWS_AS(IsoDescriptor::unitary(mat({{1, 1}, {0, 1}})), DomainError);
}

TEST_CASE("fullness examples") {
  const MD h22 = MD::bundle({SipSpace::hilbert(2), SipSpace::hilbert(2)});
  CHECK(fullness_check(h22, 2, 1));
  CHECK(fullness_check(MD::matrix_self(2), 8, 1));

  // A single sample cannot span a two-dimensional self-adjoint part.
  CHECK_FALSE(fullness_check(h22, 1, 1));

  // Sections vanishing at the second point: every [x,x] vanishes there.
  std::vector<AlgebraElement> values;
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const auto x = elem(h22, {random_matrix(rng, 2, 1), Matrix::Zero(2, 1)});
    values.push_back(csip(x, x));
  }
  CHECK_FALSE(spans_algebra(values));
  CHECK(self_adjoint_span_rank(values, 1e-9) == 1);
}

TEST_CASE("verifiers pass on the default constructions") {
  for (const MD& d : default_constructions()) {
    CAPTURE(d.label());
    CHECK(all_pass(verify_axioms(d, 200, 1)));
    CHECK(all_pass(verify_norm_properties(d, 200, 2)));
    CHECK(all_pass(verify_finsler(d, 200, 3)));
    CHECK(all_pass(verify_transport(d, 200, 4)));
    CHECK(fullness_check(d, 2 * d.algebra().self_adjoint_dimension(), 5));
  }
}

TEST_CASE("cubic identity on a one-point Hilbert bundle") {
  const MD h1 = MD::bundle({SipSpace::hilbert(1)});
  const auto f = elem(h1, {col({2})});
  CHECK(triple_norm(module_action(f, csip(f, f))) == doctest::Approx(8));
}

TEST_CASE("Commutative-only sub-check is skipped on noncommutative algebras") {
  const auto rs = verify_finsler(MD::matrix_self(2), 20, 1);
  const auto& tri = find(rs, "finsler-operator-triangle");
  CHECK(tri.trials == 0);
  CHECK(tri.note.find("skipped") != std::string::npos);
  CHECK(find(rs, "finsler-action").passed());
}

TEST_CASE("negative controls are detected") {
  const MD l3 = MD::bundle({SipSpace::lp(2, 3), SipSpace::lp(2, 3)});

  const auto flipped = verify_axioms(l3.with_fault(FaultMode::sign_flip), 50, 1);
  const auto& pos = find(flipped, "axiom-i-positivity");
  CHECK_FALSE(pos.passed());
  CHECK_FALSE(pos.witness.is_null());

  const auto broken = verify_finsler(l3.with_fault(FaultMode::broken_action), 50, 1);
  CHECK_FALSE(find(broken, "finsler-action").passed());

  const MD t = MD::transported(MD::matrix_self(2), IsoDescriptor::unitary(mat({{0, 1}, {1, 0}})));
  const auto bad = verify_transport(t.with_fault(FaultMode::non_isometric_psi), 50, 1);
  bool any_fail = false;
  for (const auto& r : bad) any_fail = any_fail || !r.passed();
  CHECK(any_fail);
}

TEST_CASE("non-transported modules report transport as skipped") {
  const auto rs = verify_transport(MD::matrix_self(2), 10, 1);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].trials == 0);
  CHECK(rs[0].passed());
}

TEST_CASE("elements from different modules do not mix") {
  const auto x = elem(MD::matrix_self(2), {Matrix::Identity(2, 2)});
  const auto y = elem(MD::matrix_self(3), {Matrix::Identity(3, 3)});
  CHECK_THROWS_AS(csip(x, y), StructuralError);
  CHECK_THROWS_AS(add(x, y), StructuralError);
  CHECK_THROWS_AS(elem(MD::matrix_self(2), {Matrix::Identity(3, 3)}), StructuralError);
}

}  // namespace csip
