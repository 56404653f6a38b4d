#include "csip/random.hpp"

#include <cmath>

namespace csip {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void fill_self_adjoint_pair(Rng& rng, const ModuleDescriptor& d, std::vector<Matrix>& xs, std::vector<Matrix>& ys) {
  switch (d.kind()) {
    case ModuleDescriptor::Kind::bundle:
      for (const auto& f : d.fibers()) {
        Matrix x(f.dim(), 1), y(f.dim(), 1);
        for (int i = 0; i < f.dim(); ++i) x(i, 0) = rng.normal();
        for (int i = 0; i < f.dim(); ++i) y(i, 0) = rng.normal();
        xs.push_back(std::move(x));
        ys.push_back(std::move(y));
      }
      break;
    case ModuleDescriptor::Kind::matrix_self: {
      const int n = d.size();
      Matrix x = random_matrix(rng, n, n);
      Matrix g = random_matrix(rng, n, n);
      Matrix h = (g + g.adjoint()) / 2.0;
      Matrix gram = x.adjoint() * x;
      Matrix y = x * gram.ldlt().solve(h);
      xs.push_back(std::move(x));
      ys.push_back(std::move(y));
      break;
    }
    case ModuleDescriptor::Kind::direct_sum:
      for (const auto& p : d.parts()) fill_self_adjoint_pair(rng, p, xs, ys);
      break;
    case ModuleDescriptor::Kind::transported:
      fill_self_adjoint_pair(rng, d.base(), xs, ys);
      break;
  }
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
  return splitmix64(splitmix64(seed ^ fnv1a(tag)) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

Rng::Rng(std::uint64_t seed, std::string_view tag, std::uint64_t index) : engine_(mix_seed(seed, tag, index)) {}

Complex Rng::complex_normal() {
  const Real s = 1 / std::sqrt(2.0);
  const Real re = normal();
  const Real im = normal();
  return {s * re, s * im};
}

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  return m;
}

Matrix random_unitary(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
  Matrix q = qr.householderQ();
  return q;
}

AlgebraElement random_algebra_element(Rng& rng, const AlgebraElement::DescriptorPtr& algebra) {
  std::vector<Matrix> blocks;
  for (const auto& l : algebra->leaves())
    blocks.push_back(random_matrix(rng, l.size, l.kind == AlgebraDescriptor::Kind::functions ? 1 : l.size));
  return AlgebraAccess::make(algebra, std::move(blocks));
}

AlgebraElement random_self_adjoint(Rng& rng, const AlgebraElement::DescriptorPtr& algebra) {
  return re(random_algebra_element(rng, algebra));
}

ModuleElement random_module_element(Rng& rng, const ModuleElement::DescriptorPtr& module) {
  std::vector<Matrix> blocks;
  for (int i = 0; i < module->block_count(); ++i) {
    const auto [r, c] = module->block_shape(i);
    blocks.push_back(random_matrix(rng, r, c));
  }
  return {module, std::move(blocks)};
}

std::pair<ModuleElement, ModuleElement> random_self_adjoint_pair(Rng& rng, const ModuleElement::DescriptorPtr& module) {
  std::vector<Matrix> xs, ys;
  fill_self_adjoint_pair(rng, *module, xs, ys);
  return {ModuleElement(module, std::move(xs)), ModuleElement(module, std::move(ys))};
}

}  // namespace csip
