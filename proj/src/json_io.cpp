#include "csip/json_io.hpp"

#include <string>

namespace csip {

namespace {

using AKind = AlgebraDescriptor::Kind;
using MKind = ModuleDescriptor::Kind;

[[noreturn]] void bad(const std::string& what) { throw UsageError("malformed literal: " + what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

int positive_int(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer() || v.get<long long>() < 1) bad(std::string("'") + key + "' must be a positive integer");
  return v.get<int>();
}

Json column_to_json(const Matrix& col) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < col.rows(); ++i) a.push_back(complex_to_json(col(i, 0)));
  return a;
}

Matrix column_from_json(const Json& j) {
  if (!j.is_array()) bad("expected an array of complex numbers");
  Matrix m(static_cast<Eigen::Index>(j.size()), 1);
  for (std::size_t i = 0; i < j.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = complex_from_json(j[i]);
  return m;
}

Json algebra_data(const AlgebraDescriptor& d, const std::vector<Matrix>& blocks, std::size_t& k) {
  switch (d.kind()) {
    case AKind::functions:
      return column_to_json(blocks[k++]);
    case AKind::matrices:
      return matrix_to_json(blocks[k++]);
    case AKind::direct_sum: {
      Json a = Json::array();
      for (const auto& p : d.parts()) a.push_back(algebra_data(p, blocks, k));
      return a;
    }
  }
  return {};
}

void algebra_blocks(const AlgebraDescriptor& d, const Json& data, std::vector<Matrix>& out) {
  switch (d.kind()) {
    case AKind::functions:
      out.push_back(column_from_json(data));
      break;
    case AKind::matrices:
      out.push_back(matrix_from_json(data));
      break;
    case AKind::direct_sum:
      if (!data.is_array() || data.size() != d.parts().size()) bad("direct-sum data must list one entry per part");
      for (std::size_t i = 0; i < d.parts().size(); ++i) algebra_blocks(d.parts()[i], data[i], out);
      break;
  }
}

Json module_data(const ModuleDescriptor& d, const std::vector<Matrix>& blocks, std::size_t& k) {
  switch (d.kind()) {
    case MKind::bundle: {
      Json a = Json::array();
      for (std::size_t t = 0; t < d.fibers().size(); ++t) a.push_back(column_to_json(blocks[k++]));
      return a;
    }
    case MKind::matrix_self:
      return matrix_to_json(blocks[k++]);
    case MKind::direct_sum: {
      Json a = Json::array();
      for (const auto& p : d.parts()) a.push_back(module_data(p, blocks, k));
      return a;
    }
    case MKind::transported:
      return module_data(d.base(), blocks, k);
  }
  return {};
}

void module_blocks(const ModuleDescriptor& d, const Json& data, std::vector<Matrix>& out) {
  switch (d.kind()) {
    case MKind::bundle:
      if (!data.is_array() || data.size() != d.fibers().size()) bad("bundle data must list one vector per point");
      for (const auto& v : data) out.push_back(column_from_json(v));
      break;
    case MKind::matrix_self:
      out.push_back(matrix_from_json(data));
      break;
    case MKind::direct_sum:
      if (!data.is_array() || data.size() != d.parts().size()) bad("direct-sum data must list one entry per part");
      for (std::size_t i = 0; i < d.parts().size(); ++i) module_blocks(d.parts()[i], data[i], out);
      break;
    case MKind::transported:
      module_blocks(d.base(), data, out);
      break;
  }
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<Real>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) bad("complex must be [re, im]");
  return {j[0].get<Real>(), j[1].get<Real>()};
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) bad("matrix must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad("matrix rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
  }
  return m;
}

Json to_json(const AlgebraDescriptor& d) {
  switch (d.kind()) {
    case AKind::functions:
      return {{"kind", "functions"}, {"m", d.size()}};
    case AKind::matrices:
      return {{"kind", "matrices"}, {"n", d.size()}};
    case AKind::direct_sum: {
      Json parts = Json::array();
      for (const auto& p : d.parts()) parts.push_back(to_json(p));
      return {{"kind", "sum"}, {"parts", parts}};
    }
  }
  return {};
}

AlgebraDescriptor algebra_descriptor_from_json(const Json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "functions") return AlgebraDescriptor::functions(positive_int(j, "m"));
  if (kind == "matrices") return AlgebraDescriptor::matrices(positive_int(j, "n"));
  if (kind == "sum") {
    std::vector<AlgebraDescriptor> parts;
    for (const auto& p : field(j, "parts")) parts.push_back(algebra_descriptor_from_json(p));
    return AlgebraDescriptor::direct_sum(std::move(parts));
  }
  bad("unknown algebra kind '" + kind + "'");
}

Json to_json(const AlgebraElement& a) {
  std::size_t k = 0;
  return {{"descriptor", to_json(a.descriptor())}, {"data", algebra_data(a.descriptor(), a.blocks(), k)}};
}

AlgebraElement algebra_element_from_json(const Json& j) {
  AlgebraDescriptor d = algebra_descriptor_from_json(field(j, "descriptor"));
  std::vector<Matrix> blocks;
  algebra_blocks(d, field(j, "data"), blocks);
  return {d, std::move(blocks)};
}

Json to_json(const SipSpace& s) {
  if (s.kind() == SipSpace::Kind::hilbert) return {{"kind", "hilbert"}, {"d", s.dim()}};
  return {{"kind", "lp"}, {"d", s.dim()}, {"p", s.p()}};
}

SipSpace sip_space_from_json(const Json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "hilbert") return SipSpace::hilbert(positive_int(j, "d"));
  if (kind == "lp") {
    const Json& p = field(j, "p");
    if (!p.is_number()) bad("'p' must be a number");
    return SipSpace::lp(positive_int(j, "d"), p.get<Real>());
  }
  bad("unknown s.i.p. space kind '" + kind + "'");
}

Json to_json(const IsoDescriptor& iso) {
  if (iso.kind() == IsoDescriptor::Kind::permute) return {{"kind", "permute"}, {"perm", iso.permutation()}};
  return {{"kind", "unitary"}, {"u", matrix_to_json(iso.unitary_matrix())}};
}

IsoDescriptor iso_from_json(const Json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "permute") return IsoDescriptor::permute(field(j, "perm").get<std::vector<int>>());
  if (kind == "unitary") return IsoDescriptor::unitary(matrix_from_json(field(j, "u")));
  bad("unknown iso kind '" + kind + "'");
}

Json to_json(const ModuleDescriptor& d) {
  Json j;
  switch (d.kind()) {
    case MKind::bundle: {
      Json fibers = Json::array();
      for (const auto& f : d.fibers()) fibers.push_back(to_json(f));
      j = {{"kind", "bundle"}, {"fibers", fibers}};
      break;
    }
    case MKind::matrix_self:
      j = {{"kind", "matrix"}, {"n", d.size()}};
      break;
    case MKind::direct_sum: {
      Json parts = Json::array();
      for (const auto& p : d.parts()) parts.push_back(to_json(p));
      j = {{"kind", "sum"}, {"parts", parts}};
      break;
    }
    case MKind::transported:
      j = {{"kind", "transported"}, {"base", to_json(d.base())}, {"iso", to_json(d.iso())}};
      break;
  }
  if (d.fault() != FaultMode::none) j["fault"] = fault_name(d.fault());
  return j;
}

ModuleDescriptor module_descriptor_from_json(const Json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  auto with_fault = [&](ModuleDescriptor d) {
    if (j.contains("fault")) return d.with_fault(fault_from_name(j.at("fault").get<std::string>()));
    return d;
  };
  if (kind == "bundle") {
    std::vector<SipSpace> fibers;
    for (const auto& f : field(j, "fibers")) fibers.push_back(sip_space_from_json(f));
    return with_fault(ModuleDescriptor::bundle(std::move(fibers)));
  }
  if (kind == "matrix") return with_fault(ModuleDescriptor::matrix_self(positive_int(j, "n")));
  if (kind == "sum") {
    std::vector<ModuleDescriptor> parts;
    for (const auto& p : field(j, "parts")) parts.push_back(module_descriptor_from_json(p));
    return with_fault(ModuleDescriptor::direct_sum(std::move(parts)));
  }
  if (kind == "transported")
    return with_fault(
        ModuleDescriptor::transported(module_descriptor_from_json(field(j, "base")), iso_from_json(field(j, "iso"))));
  bad("unknown module kind '" + kind + "'");
}

Json to_json(const ModuleElement& x) {
  std::size_t k = 0;
  return {{"descriptor", to_json(x.descriptor())}, {"data", module_data(x.descriptor(), x.blocks(), k)}};
}

ModuleElement module_element_from_json(const Json& j) {
  ModuleDescriptor d = module_descriptor_from_json(field(j, "descriptor"));
  std::vector<Matrix> blocks;
  module_blocks(d, field(j, "data"), blocks);
  return {d, std::move(blocks)};
}

Json to_json(const NumericPolicy& p) {
  return {{"tol_eq", p.tol_eq}, {"tol_pos", p.tol_pos}, {"tol_opt", p.tol_opt}};
}

NumericPolicy policy_from_json(const Json& j, NumericPolicy p) {
  if (!j.is_object()) bad("policy must be an object");
  if (j.contains("tol_eq")) p.tol_eq = j.at("tol_eq").get<Real>();
  if (j.contains("tol_pos")) p.tol_pos = j.at("tol_pos").get<Real>();
  if (j.contains("tol_opt")) p.tol_opt = j.at("tol_opt").get<Real>();
  try {
    p.validate();
  } catch (const DomainError& e) {
    bad(e.what());
  }
  return p;
}

const char* fault_name(FaultMode f) {
  switch (f) {
    case FaultMode::none: return "none";
    case FaultMode::sign_flip: return "sign-flip";
    case FaultMode::broken_action: return "broken-action";
    case FaultMode::fiber_mixing: return "fiber-mixing";
    case FaultMode::non_isometric_psi: return "non-isometric-psi";
  }
  return "none";
}

FaultMode fault_from_name(const std::string& name) {
  for (FaultMode f : {FaultMode::none, FaultMode::sign_flip, FaultMode::broken_action, FaultMode::fiber_mixing,
                      FaultMode::non_isometric_psi})
    if (name == fault_name(f)) return f;
  throw UsageError("unknown fault mode '" + name + "'");
}

}  // namespace csip
