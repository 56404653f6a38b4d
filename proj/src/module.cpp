#include "csip/module.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "csip/spectral.hpp"

namespace csip {

namespace {

using ALeaf = AlgebraDescriptor::Leaf;
using AKind = AlgebraDescriptor::Kind;

std::string fiber_label(const SipSpace& s) {
  if (s.kind() == SipSpace::Kind::hilbert) return "H" + std::to_string(s.dim());
  std::string p = std::to_string(s.p());
  p.erase(p.find_last_not_of('0') + 1);
  if (!p.empty() && p.back() == '.') p.pop_back();
  return "L" + std::to_string(s.dim()) + "p" + p;
}

// Number of leaves the node contributes to its algebra.
int leaf_count(const ModuleDescriptor& d) { return static_cast<int>(d.algebra().leaves().size()); }

void require_same(const ModuleElement& x, const ModuleElement& y, const char* op) {
  if (!x.same_module(y)) throw StructuralError(std::string(op) + ": elements belong to different modules");
}

// psi as used by a transported node; the non-isometric fault doubles it.
AlgebraElement node_psi(const ModuleDescriptor& d, const AlgebraElement& a) {
  AlgebraElement out = d.iso().apply(a);
  if (d.fault() == FaultMode::non_isometric_psi) out = scalar_mul(2.0, out);
  return out;
}

AlgebraElement node_psi_inverse(const ModuleDescriptor& d, const AlgebraElement& b) {
  AlgebraElement out = d.iso().apply_inverse(b);
  if (d.fault() == FaultMode::non_isometric_psi) out = scalar_mul(0.5, out);
  return out;
}

void csip_node(const ModuleDescriptor& d, const Matrix* xb, const Matrix* yb, std::vector<Matrix>& out) {
  const std::size_t first = out.size();
  switch (d.kind()) {
    case ModuleDescriptor::Kind::bundle: {
      const auto& fibers = d.fibers();
      Matrix values(static_cast<Eigen::Index>(fibers.size()), 1);
      for (std::size_t t = 0; t < fibers.size(); ++t) values(t, 0) = sip(fibers[t], xb[t], yb[t]);
      out.push_back(std::move(values));
      break;
    }
    case ModuleDescriptor::Kind::matrix_self:
      out.push_back(xb[0].adjoint() * yb[0]);
      break;
    case ModuleDescriptor::Kind::direct_sum: {
      int offset = 0;
      for (const auto& part : d.parts()) {
        csip_node(part, xb + offset, yb + offset, out);
        offset += part.block_count();
      }
      break;
    }
    case ModuleDescriptor::Kind::transported: {
      std::vector<Matrix> base_blocks;
      csip_node(d.base(), xb, yb, base_blocks);
      AlgebraElement mapped = node_psi(d, AlgebraAccess::make(d.base().algebra_ptr(), std::move(base_blocks)));
      for (const auto& b : mapped.blocks()) out.push_back(b);
      break;
    }
  }
  if (d.fault() == FaultMode::sign_flip)
    for (std::size_t i = first; i < out.size(); ++i) out[i] = -out[i];
}

void action_node(const ModuleDescriptor& d, const Matrix* xb, const Matrix* ab, std::vector<Matrix>& out) {
  const std::size_t first = out.size();
  switch (d.kind()) {
    case ModuleDescriptor::Kind::bundle: {
      const Matrix& a = ab[0];
      for (std::size_t t = 0; t < d.fibers().size(); ++t) out.push_back(xb[t] * a(t, 0));
      break;
    }
    case ModuleDescriptor::Kind::matrix_self:
      out.push_back(xb[0] * ab[0]);
      break;
    case ModuleDescriptor::Kind::direct_sum: {
      int block_offset = 0;
      int leaf_offset = 0;
      for (const auto& part : d.parts()) {
        action_node(part, xb + block_offset, ab + leaf_offset, out);
        block_offset += part.block_count();
        leaf_offset += leaf_count(part);
      }
      break;
    }
    case ModuleDescriptor::Kind::transported: {
      std::vector<Matrix> node_blocks(ab, ab + leaf_count(d));
      AlgebraElement pulled = node_psi_inverse(d, AlgebraAccess::make(d.algebra_ptr(), std::move(node_blocks)));
      action_node(d.base(), xb, pulled.blocks().data(), out);
      break;
    }
  }
  if (d.fault() == FaultMode::broken_action)
    for (std::size_t i = first; i < out.size(); ++i) out[i] += xb[i - first];
}

}  // namespace

// ---------------------------------------------------------------------------
// IsoDescriptor

IsoDescriptor IsoDescriptor::permute(std::vector<int> permutation) {
  std::vector<int> sorted = permutation;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (sorted[i] != static_cast<int>(i)) throw StructuralError("iso: not a permutation of 0..m-1");
  if (permutation.empty()) throw StructuralError("iso: empty permutation");
  return {Kind::permute, std::move(permutation), Matrix()};
}

IsoDescriptor IsoDescriptor::unitary(Matrix u, const NumericPolicy& policy) {
  if (u.rows() != u.cols() || u.rows() < 1) throw StructuralError("iso: unitary must be square");
  const Matrix defect = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  if (spectral::operator_norm(defect) > policy.tol_eq) throw DomainError("iso: matrix is not unitary");
  return {Kind::unitary, {}, std::move(u)};
}

bool IsoDescriptor::acts_on(const AlgebraDescriptor& algebra) const {
  return std::any_of(algebra.leaves().begin(), algebra.leaves().end(), [&](const ALeaf& l) {
    if (kind_ == Kind::permute) return l.kind == AKind::functions && l.size == static_cast<int>(perm_.size());
    return l.kind == AKind::matrices && l.size == u_.rows();
  });
}

AlgebraElement IsoDescriptor::map(const AlgebraElement& a, bool inverse) const {
  const auto& leaves = a.descriptor().leaves();
  std::vector<Matrix> out;
  out.reserve(leaves.size());
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    const Matrix& x = a.block(i);
    if (kind_ == Kind::permute && leaves[i].kind == AKind::functions && leaves[i].size == static_cast<int>(perm_.size())) {
      Matrix y(x.rows(), 1);
      for (std::size_t t = 0; t < perm_.size(); ++t) {
        if (inverse)
          y(perm_[t], 0) = x(t, 0);
        else
          y(t, 0) = x(perm_[t], 0);
      }
      out.push_back(std::move(y));
    } else if (kind_ == Kind::unitary && leaves[i].kind == AKind::matrices && leaves[i].size == u_.rows()) {
      out.push_back(inverse ? Matrix(u_.adjoint() * x * u_) : Matrix(u_ * x * u_.adjoint()));
    } else {
      out.push_back(x);
    }
  }
  return AlgebraAccess::make(a.descriptor_ptr(), std::move(out));
}

AlgebraElement IsoDescriptor::apply(const AlgebraElement& a) const { return map(a, false); }
AlgebraElement IsoDescriptor::apply_inverse(const AlgebraElement& a) const { return map(a, true); }

bool IsoDescriptor::operator==(const IsoDescriptor& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == Kind::permute) return perm_ == other.perm_;
  return u_.rows() == other.u_.rows() && u_ == other.u_;
}

// ---------------------------------------------------------------------------
// ModuleDescriptor

ModuleDescriptor ModuleDescriptor::bundle(std::vector<SipSpace> fibers) {
  if (fibers.empty()) throw StructuralError("bundle needs at least one fiber");
  ModuleDescriptor d;
  d.kind_ = Kind::bundle;
  d.fibers_ = std::move(fibers);
  d.finish();
  return d;
}

ModuleDescriptor ModuleDescriptor::matrix_self(int n) {
  if (n < 1) throw StructuralError("matrix module size must be at least 1");
  ModuleDescriptor d;
  d.kind_ = Kind::matrix_self;
  d.n_ = n;
  d.finish();
  return d;
}

ModuleDescriptor ModuleDescriptor::direct_sum(std::vector<ModuleDescriptor> parts) {
  if (parts.empty()) throw StructuralError("direct sum needs at least one part");
  ModuleDescriptor d;
  d.kind_ = Kind::direct_sum;
  d.parts_ = std::move(parts);
  d.finish();
  return d;
}

ModuleDescriptor ModuleDescriptor::transported(ModuleDescriptor base, IsoDescriptor iso) {
  if (!iso.acts_on(base.algebra()))
    throw StructuralError("iso does not act on any block of the base algebra");
  ModuleDescriptor d;
  d.kind_ = Kind::transported;
  d.parts_.push_back(std::move(base));
  d.isos_.push_back(std::move(iso));
  d.finish();
  return d;
}

void ModuleDescriptor::finish() {
  shapes_.clear();
  switch (kind_) {
    case Kind::bundle:
      algebra_ = std::make_shared<const AlgebraDescriptor>(AlgebraDescriptor::functions(static_cast<int>(fibers_.size())));
      for (const auto& f : fibers_) shapes_.emplace_back(f.dim(), 1);
      break;
    case Kind::matrix_self:
      algebra_ = std::make_shared<const AlgebraDescriptor>(AlgebraDescriptor::matrices(n_));
      shapes_.emplace_back(n_, n_);
      break;
    case Kind::direct_sum: {
      std::vector<AlgebraDescriptor> algebras;
      for (const auto& p : parts_) {
        algebras.push_back(p.algebra());
        shapes_.insert(shapes_.end(), p.shapes_.begin(), p.shapes_.end());
      }
      algebra_ = std::make_shared<const AlgebraDescriptor>(AlgebraDescriptor::direct_sum(std::move(algebras)));
      break;
    }
    case Kind::transported:
      algebra_ = parts_.front().algebra_;
      shapes_ = parts_.front().shapes_;
      break;
  }
  block_count_ = static_cast<int>(shapes_.size());
}

ModuleDescriptor ModuleDescriptor::with_fault(FaultMode fault) const {
  ModuleDescriptor d = *this;
  d.fault_ = fault;
  return d;
}

std::pair<int, int> ModuleDescriptor::block_shape(int i) const { return shapes_.at(i); }

bool ModuleDescriptor::is_hilbert() const {
  switch (kind_) {
    case Kind::bundle:
      return std::all_of(fibers_.begin(), fibers_.end(),
                         [](const SipSpace& s) { return s.kind() == SipSpace::Kind::hilbert; });
    case Kind::matrix_self:
      return true;
    default:
      return std::all_of(parts_.begin(), parts_.end(), [](const ModuleDescriptor& p) { return p.is_hilbert(); });
  }
}

std::string ModuleDescriptor::label() const {
  std::string s;
  switch (kind_) {
    case Kind::bundle:
      s = "bundle(";
      for (std::size_t i = 0; i < fibers_.size(); ++i) s += (i ? "," : "") + fiber_label(fibers_[i]);
      s += ")";
      break;
    case Kind::matrix_self:
      s = "matrix(" + std::to_string(n_) + ")";
      break;
    case Kind::direct_sum:
      s = "sum(";
      for (std::size_t i = 0; i < parts_.size(); ++i) s += (i ? "," : "") + parts_[i].label();
      s += ")";
      break;
    case Kind::transported:
      s = "transported(" + parts_.front().label() + "," +
          (isos_.front().kind() == IsoDescriptor::Kind::permute ? "permute" : "unitary") + ")";
      break;
  }
  if (fault_ != FaultMode::none) s += "!fault";
  return s;
}

bool ModuleDescriptor::operator==(const ModuleDescriptor& other) const {
  return kind_ == other.kind_ && fibers_ == other.fibers_ && n_ == other.n_ && parts_ == other.parts_ &&
         isos_ == other.isos_ && fault_ == other.fault_;
}

// ---------------------------------------------------------------------------
// ModuleElement

ModuleElement::ModuleElement(const ModuleDescriptor& descriptor, std::vector<Matrix> blocks)
    : ModuleElement(std::make_shared<const ModuleDescriptor>(descriptor), std::move(blocks)) {}

ModuleElement::ModuleElement(DescriptorPtr descriptor, std::vector<Matrix> blocks)
    : descriptor_(std::move(descriptor)), blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != descriptor_->block_count())
    throw StructuralError("module element has " + std::to_string(blocks_.size()) + " blocks, expected " +
                          std::to_string(descriptor_->block_count()));
  for (int i = 0; i < descriptor_->block_count(); ++i) {
    const auto [r, c] = descriptor_->block_shape(i);
    if (blocks_[i].rows() != r || blocks_[i].cols() != c)
      throw StructuralError("module element block " + std::to_string(i) + " has the wrong shape");
    if (!blocks_[i].allFinite()) throw StructuralError("module element has non-finite entries");
  }
}

ModuleElement ModuleElement::zero(DescriptorPtr descriptor) {
  std::vector<Matrix> blocks;
  for (int i = 0; i < descriptor->block_count(); ++i) {
    const auto [r, c] = descriptor->block_shape(i);
    blocks.push_back(Matrix::Zero(r, c));
  }
  return {std::move(descriptor), std::move(blocks)};
}

ModuleElement ModuleElement::zero(const ModuleDescriptor& descriptor) {
  return zero(std::make_shared<const ModuleDescriptor>(descriptor));
}

bool ModuleElement::is_zero() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const Matrix& b) { return b.isZero(0.0); });
}

ModuleElement add(const ModuleElement& x, const ModuleElement& y) { return axpy(x, 1.0, y); }
ModuleElement sub(const ModuleElement& x, const ModuleElement& y) { return axpy(x, -1.0, y); }

ModuleElement scalar_mul(Complex lambda, const ModuleElement& x) {
  std::vector<Matrix> blocks;
  blocks.reserve(x.blocks().size());
  for (const auto& b : x.blocks()) blocks.push_back(lambda * b);
  return {x.descriptor_ptr(), std::move(blocks)};
}

ModuleElement axpy(const ModuleElement& x, Complex alpha, const ModuleElement& y) {
  require_same(x, y, "axpy");
  std::vector<Matrix> blocks;
  blocks.reserve(x.blocks().size());
  for (std::size_t i = 0; i < x.blocks().size(); ++i) blocks.push_back(x.block(i) + alpha * y.block(i));
  return {x.descriptor_ptr(), std::move(blocks)};
}

AlgebraElement csip(const ModuleElement& x, const ModuleElement& y) {
  require_same(x, y, "csip");
  std::vector<Matrix> out;
  out.reserve(x.descriptor().algebra().leaves().size());
  csip_node(x.descriptor(), x.blocks().data(), y.blocks().data(), out);
  return AlgebraAccess::make(x.descriptor().algebra_ptr(), std::move(out));
}

ModuleElement module_action(const ModuleElement& x, const AlgebraElement& a) {
  if (!(a.descriptor() == x.descriptor().algebra()))
    throw StructuralError("module_action: algebra element does not belong to the module's algebra");
  std::vector<Matrix> out;
  out.reserve(x.blocks().size());
  action_node(x.descriptor(), x.blocks().data(), a.blocks().data(), out);
  return {x.descriptor_ptr(), std::move(out)};
}

Real triple_norm(const ModuleElement& x) { return std::sqrt(cstar_norm(csip(x, x))); }

AlgebraElement rho(const ModuleElement& x, const NumericPolicy& policy) { return sqrt_positive(csip(x, x), policy); }

Real hermitian_defect(const ModuleElement& x, const ModuleElement& y) {
  return cstar_norm(sub(csip(x, y), star(csip(y, x))));
}

int self_adjoint_span_rank(std::span<const AlgebraElement> values, Real tol) {
  if (values.empty()) return 0;
  const auto dim = values.front().descriptor().self_adjoint_dimension();
  Eigen::MatrixXd coords(dim, static_cast<Eigen::Index>(values.size()));
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!values[j].same_algebra(values.front())) throw StructuralError("span rank: mixed algebras");
    coords.col(static_cast<Eigen::Index>(j)) = self_adjoint_coordinates(values[j]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(coords);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++rank;
  return rank;
}

bool spans_algebra(std::span<const AlgebraElement> values, const NumericPolicy& policy) {
  if (values.empty()) return false;
  return self_adjoint_span_rank(values, policy.tol_eq) == values.front().descriptor().self_adjoint_dimension();
}

}  // namespace csip
