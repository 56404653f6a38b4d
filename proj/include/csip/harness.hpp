#pragma once

// Suite orchestration over a set of constructions, with seeded per-trial
// streams so the report does not depend on scheduling.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "csip/module.hpp"
#include "csip/report.hpp"

namespace csip {

inline constexpr const char* kVersion = "cstar-sip 0.1.0";

enum class Suite { axioms, norms, finsler, fullness, transport, orthogonality, thm34, operators, counterexamples };

const char* suite_name(Suite s);
Suite suite_from_name(const std::string& name);
const std::vector<Suite>& all_suites();
/// Every suite except counterexamples, whose searches are reported, not asserted.
bool is_mandatory(Suite s);

/// The suite each negative-control fault is meant to trip.
Suite target_suite(FaultMode fault);

struct SuiteConfig {
  std::vector<ModuleDescriptor> constructions;
  int trials = 1000;
  std::uint64_t seed = 42;
  NumericPolicy policy;
  std::vector<Suite> suites;
  FaultMode fault = FaultMode::none;
  /// Worker threads; 0 picks the hardware concurrency.
  int jobs = 0;

  /// Throws UsageError on an empty suite list, no constructions or trials < 1.
  void validate() const;
};

/// Bundle(H2,H2), Bundle(L2p3 x2), Bundle(L3p1.5 x3), matrix(2), matrix(3),
/// a sum of two mixed bundles, a sum of a bundle and matrix(2), and the
/// transport of each of those along every automorphism kind that acts on it.
std::vector<ModuleDescriptor> default_constructions();
SuiteConfig default_config();

/// Missing keys fall back to default_config(). Throws UsageError.
SuiteConfig config_from_json(const nlohmann::json& j);

struct SuiteResult {
  Suite suite;
  std::vector<VerificationReport> reports;
  double seconds = 0;

  bool passed() const;
};

struct RunReport {
  std::string version = kVersion;
  std::uint64_t seed = 0;
  int trials = 0;
  FaultMode fault = FaultMode::none;
  NumericPolicy policy;
  std::vector<std::string> constructions;
  std::vector<SuiteResult> suites;

  /// Zero failures across the mandatory suites.
  bool overall() const;
  const SuiteResult* find(Suite s) const;
};

/// Everything except wall-clock timing; byte-identical for equal configs.
nlohmann::json comparable_payload(const RunReport& r);
/// comparable_payload plus a "timing" object.
nlohmann::json to_json(const RunReport& r);

RunReport run_suites(const SuiteConfig& config);
/// run_suites restricted to the counterexamples suite.
RunReport find_counterexamples(const SuiteConfig& config);

/// JSON schema for RunReport documents.
nlohmann::json report_schema();

}  // namespace csip
