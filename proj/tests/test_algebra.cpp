#include <cmath>
#include <random>

#include "doctest.h"

#include "csip/algebra.hpp"
#include "test_util.hpp"

namespace csip {
using namespace test;

namespace {

// Small generator kept separate from the library sampler so the oracles do not
// share its code path.
struct Gen {
  std::mt19937_64 eng;
  std::normal_distribution<Real> n{0.0, 1.0};
  explicit Gen(std::uint64_t seed) : eng(seed) {}
  Complex z() { return {n(eng), n(eng)}; }
  Matrix m(int r, int c) {
    Matrix out(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) out(i, j) = z();
    return out;
  }
  AlgebraElement elem(const AlgebraDescriptor& d) {
    std::vector<Matrix> blocks;
    for (const auto& leaf : d.leaves())
      blocks.push_back(leaf.kind == AlgebraDescriptor::Kind::functions ? m(leaf.size, 1) : m(leaf.size, leaf.size));
    return AlgebraElement(d, std::move(blocks));
  }
  AlgebraElement self_adjoint(const AlgebraDescriptor& d) { return re(elem(d)); }
};

std::vector<AlgebraDescriptor> descriptors() {
  using AD = AlgebraDescriptor;
  return {AD::functions(1), AD::functions(3), AD::matrices(2), AD::matrices(3),
          AD::direct_sum({AD::functions(2), AD::matrices(2)}), AD::direct_sum({AD::matrices(3), AD::matrices(1)})};
}

// Largest singular value by power iteration on m* m.
Real power_norm(const Matrix& m) {
  Vector v = Vector::Ones(m.cols());
  Real s = 0;
  for (int it = 0; it < 2000; ++it) {
    Vector w = m.adjoint() * (m * v);
    const Real nw = w.norm();
    if (nw == 0) return 0;
    s = std::sqrt(nw / v.norm());
    v = w / nw;
  }
  return s;
}

Real oracle_norm(const AlgebraElement& a) {
  Real best = 0;
  for (std::size_t i = 0; i < a.blocks().size(); ++i) {
    const auto& leaf = a.descriptor().leaves()[i];
    const Matrix& b = a.block(i);
    best = std::max(best, leaf.kind == AlgebraDescriptor::Kind::functions ? b.cwiseAbs().maxCoeff() : power_norm(b));
  }
  return best;
}

}  // namespace

TEST_CASE("componentwise and blockwise addition") {
  CHECK(payload_gap(add(fn({1, 2}), fn({3, -2})), fn({4, 0})) == 0);
  CHECK(payload_gap(add(mx(mat({{5}})), mx(mat({{0}}))), mx(mat({{5}}))) == 0);

  const auto d = AlgebraDescriptor::direct_sum({AlgebraDescriptor::functions(1), AlgebraDescriptor::matrices(1)});
  const AlgebraElement a(d, {col({1}), mat({{2}})});
  const AlgebraElement b(d, {col({1}), mat({{-2}})});
  const AlgebraElement want(d, {col({2}), mat({{0}})});
  CHECK(payload_gap(add(a, b), want) == 0);
}

TEST_CASE("mismatched descriptors are structural errors") {
  CHECK_THROWS_AS(add(fn({1, 2}), fn({1, 2, 3})), StructuralError);
  CHECK_THROWS_AS(mul(fn({1}), mx(mat({{1}}))), StructuralError);
  CHECK_THROWS_AS(AlgebraElement(AlgebraDescriptor::matrices(2), {col({1, 2})}), StructuralError);
}

TEST_CASE("star, mul and scalar_mul") {
  const Complex i(0, 1);
  CHECK(payload_gap(star(fn({i, 1})), fn({-i, 1})) == 0);
  CHECK(payload_gap(star(mx(mat({{0, 1}, {0, 0}}))), mx(mat({{0, 0}, {1, 0}}))) == 0);
  CHECK(payload_gap(mul(fn({2, 3}), fn({1, 0})), fn({2, 0})) == 0);
  CHECK(payload_gap(scalar_mul(i, fn({1, 2})), fn({i, 2.0 * i})) == 0);
}

TEST_CASE("cstar_norm examples") {
  const Complex i(0, 1);
  CHECK(cstar_norm(fn({3.0 * i, -4})) == doctest::Approx(4));
  CHECK(cstar_norm(mx(diag({3, -4}))) == doctest::Approx(4));
  const auto d = AlgebraDescriptor::direct_sum({AlgebraDescriptor::functions(1), AlgebraDescriptor::functions(1)});
  CHECK(cstar_norm(AlgebraElement(d, {col({2}), col({5})})) == doctest::Approx(5));
}

TEST_CASE("norm of a non-normal matrix against the closed form") {
  // [[1,2],[3,4]]: a*a has trace 30 and determinant 4, so the top eigenvalue is 15 + sqrt(221).
  const Real want = std::sqrt(15 + std::sqrt(221.0));
  CHECK(cstar_norm(mx(mat({{1, 2}, {3, 4}}))) == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("re and is_self_adjoint") {
  const Complex i(0, 1);
  CHECK(payload_gap(re(fn({1.0 + 2.0 * i, 3})), fn({1, 3})) == 0);
  CHECK(payload_gap(re(mx(mat({{0, 2}, {0, 0}}))), mx(mat({{0, 1}, {1, 0}}))) == 0);
  CHECK_FALSE(is_self_adjoint(AlgebraElement(AlgebraDescriptor::functions(1), {col({i})})));
  CHECK(is_self_adjoint(mx(mat({{1, i}, {-i, 2}}))));
}

TEST_CASE("positivity examples") {
  CHECK(is_positive(fn({1, 2})));
  CHECK_FALSE(is_positive(fn({1, -0.5})));

  // Characteristic polynomial of [[2,1],[1,2]]: l^2 - 4l + 3.
  const Real tr = 4, det = 3;
  const Real disc = std::sqrt(tr * tr - 4 * det);
  const Real lo = (tr - disc) / 2, hi = (tr + disc) / 2;
  CHECK(lo == doctest::Approx(1));
  CHECK(hi == doctest::Approx(3));
  const AlgebraElement a = mx(mat({{2, 1}, {1, 2}}));
  CHECK(is_positive(a));
  CHECK(min_spectrum(a) == doctest::Approx(lo).epsilon(1e-13));
}

TEST_CASE("leq examples") {
  CHECK(leq(fn({1, 1}), fn({2, 1})));
  CHECK_FALSE(leq(mx(diag({1, 3})), mx(diag({2, 2}))));
  Gen g(7);
  for (const auto& d : descriptors()) {
    const AlgebraElement a = g.self_adjoint(d);
    CHECK(leq(a, a));
  }
}

TEST_CASE("sqrt_positive examples") {
  CHECK(payload_gap(sqrt_positive(fn({4, 9})), fn({2, 3})) < 1e-15);
  const AlgebraElement id = AlgebraElement::one(AlgebraDescriptor::matrices(2));
  CHECK(payload_gap(sqrt_positive(id), id) < 1e-15);

  // Eigenpairs (3, (1,1)/sqrt2) and (1, (1,-1)/sqrt2).
  const Real s3 = std::sqrt(3.0);
  const Matrix want = 0.5 * mat({{1 + s3, s3 - 1}, {s3 - 1, 1 + s3}});
  CHECK(payload_gap(sqrt_positive(mx(mat({{2, 1}, {1, 2}}))), mx(want)) < 1e-14);

  CHECK_THROWS_AS(sqrt_positive(fn({1, -1})), DomainError);
}

TEST_CASE("regularized_inv_sqrt examples") {
  CHECK(payload_gap(regularized_inv_sqrt(fn({3}), 1), fn({0.5})) < 1e-15);
  CHECK(payload_gap(regularized_inv_sqrt(fn({0, 0}), 4), fn({0.5, 0.5})) < 1e-15);
  CHECK(payload_gap(regularized_inv_sqrt(mx(diag({3, 8})), 1), mx(diag({0.5, 1.0 / 3}))) < 1e-15);
  CHECK_THROWS_AS(regularized_inv_sqrt(fn({1}), 0), DomainError);
  CHECK_THROWS_AS(regularized_inv_sqrt(fn({1}), -1), DomainError);
}

TEST_CASE("cube_norm_identity_check examples") {
  CHECK(cube_norm_identity_check(fn({1, -2})));
  CHECK(cstar_norm(mul(mul(fn({1, -2}), fn({1, -2})), fn({1, -2}))) == doctest::Approx(8));
  CHECK(cube_norm_identity_check(mx(mat({{0, 1}, {1, 0}}))));
  CHECK_THROWS_AS(cube_norm_identity_check(mx(mat({{0, 1}, {0, 0}}))), DomainError);

  // Independent eigen-solve (general complex Schur) for max |l|^3.
  Gen g(11);
  for (int trial = 0; trial < 20; ++trial) {
    const AlgebraElement a = g.self_adjoint(AlgebraDescriptor::matrices(3));
    Eigen::ComplexEigenSolver<Matrix> es(a.block(0));
    const Real r = es.eigenvalues().cwiseAbs().maxCoeff();
    CHECK(cube_norm_identity_check(a));
    CHECK(cstar_norm(mul(mul(a, a), a)) == doctest::Approx(r * r * r).epsilon(1e-10));
  }
}

TEST_CASE("generalized_max_ratio") {
  CHECK(generalized_max_ratio(fn({2, 9}), fn({1, 3})) == doctest::Approx(3));
  CHECK(generalized_max_ratio(mx(diag({4, 1})), mx(diag({1, 1}))) == doctest::Approx(4));
  CHECK(std::isinf(generalized_max_ratio(fn({1, 1}), fn({1, 0}))));
}

TEST_CASE("property: cstar_norm agrees with a power-iteration oracle and the C*-identity holds") {
  Gen g(2024);
  for (const auto& d : descriptors()) {
    for (int trial = 0; trial < 50; ++trial) {
      const AlgebraElement a = g.elem(d);
      const Real n = cstar_norm(a);
      CHECK(std::abs(n - oracle_norm(a)) <= 1e-9 * (1 + n));
      CHECK(std::abs(cstar_norm(mul(star(a), a)) - n * n) <= 1e-9 * (1 + n * n));
    }
  }
}

TEST_CASE("property: sqrt round trip, positivity of a*a, a <= |a|") {
  Gen g(99);
  for (const auto& d : descriptors()) {
    for (int trial = 0; trial < 50; ++trial) {
      const AlgebraElement a = g.elem(d);
      const AlgebraElement p = mul(star(a), a);
      CHECK(is_positive(p));
      const AlgebraElement s = sqrt_positive(p);
      CHECK(is_positive(s));
      CHECK(cstar_norm(sub(mul(s, s), p)) <= 1e-9 * (1 + cstar_norm(p)));

      const AlgebraElement h = g.self_adjoint(d);
      CHECK(leq(h, abs_value(h)));
    }
  }
}

TEST_CASE("property: leq is a partial order on sampled self-adjoint triples") {
  Gen g(5);
  for (const auto& d : descriptors()) {
    for (int trial = 0; trial < 50; ++trial) {
      const AlgebraElement a = g.self_adjoint(d);
      const AlgebraElement e = g.elem(d);
      const AlgebraElement b = add(a, mul(star(e), e));
      const AlgebraElement q = g.elem(d);
      const AlgebraElement c = add(b, mul(star(q), q));
      CHECK(leq(a, b));
      CHECK(leq(b, c));
      CHECK(leq(a, c));
      // Antisymmetry: a <= b and b <= a only when b - a is negligible.
      if (leq(b, a)) CHECK(cstar_norm(sub(b, a)) <= 1e-6 * (1 + cstar_norm(a)));
    }
  }
}

TEST_CASE("property: regularized_inv_sqrt inverts a + eps") {
  Gen g(31);
  for (const auto& d : descriptors()) {
    for (int trial = 0; trial < 50; ++trial) {
      const AlgebraElement x = g.elem(d);
      const AlgebraElement a = mul(star(x), x);
      const Real eps = std::exp(g.n(g.eng));
      const AlgebraElement r = regularized_inv_sqrt(a, eps);
      const AlgebraElement shifted = add(a, scalar_mul(eps, AlgebraElement::one(d)));
      const AlgebraElement prod = mul(mul(r, shifted), r);
      CHECK(cstar_norm(sub(prod, AlgebraElement::one(d))) <= 1e-9 * (1 + cstar_norm(a) / eps));
    }
  }
}

TEST_CASE("self-adjoint coordinates have the real dimension of the self-adjoint part") {
  for (const auto& d : descriptors()) {
    Gen g(3);
    CHECK(self_adjoint_coordinates(g.elem(d)).size() == d.self_adjoint_dimension());
  }
  CHECK(AlgebraDescriptor::matrices(3).self_adjoint_dimension() == 9);
  CHECK_FALSE(AlgebraDescriptor::matrices(2).is_commutative());
  CHECK(AlgebraDescriptor::functions(4).is_commutative());
}

}  // namespace csip
