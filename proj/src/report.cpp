#include "csip/report.hpp"

namespace csip {

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json j;
  j["property"] = r.property;
  j["construction"] = r.construction;
  j["trials"] = r.trials;
  j["failures"] = r.failures;
  j["skipped"] = r.skipped;
  j["worst_margin"] = std::isfinite(r.worst_margin) ? nlohmann::json(r.worst_margin) : nlohmann::json();
  j["tolerance"] = r.tolerance;
  j["witness"] = r.witness;
  j["note"] = r.note;
  return j;
}

VerificationReport report_from_json(const nlohmann::json& j) {
  VerificationReport r;
  r.property = j.at("property").get<std::string>();
  r.construction = j.value("construction", "");
  r.trials = j.at("trials").get<int>();
  r.failures = j.at("failures").get<int>();
  r.skipped = j.value("skipped", 0);
  r.worst_margin = j.at("worst_margin").is_null() ? std::numeric_limits<Real>::infinity()
                                                  : j.at("worst_margin").get<Real>();
  r.tolerance = j.value("tolerance", 0.0);
  r.witness = j.value("witness", nlohmann::json());
  r.note = j.value("note", "");
  return r;
}

}  // namespace csip
