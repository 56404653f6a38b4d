#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "json.hpp"

#include "csip/types.hpp"

namespace csip {

/// Outcome of one property over a batch of seeded trials.
///
/// Every trial contributes a signed margin: relative slack for inequalities,
/// minus the relative error for identities. A trial fails when its margin
/// drops below -tolerance. The first failing trial's witness is kept.
struct VerificationReport {
  std::string property;
  std::string construction;
  int trials = 0;
  int failures = 0;
  int skipped = 0;
  Real worst_margin = std::numeric_limits<Real>::infinity();
  Real tolerance = 0;
  nlohmann::json witness;
  std::string note;

  VerificationReport() = default;
  VerificationReport(std::string property_, std::string construction_, Real tolerance_)
      : property(std::move(property_)), construction(std::move(construction_)), tolerance(tolerance_) {}

  bool passed() const { return failures == 0; }

  template <typename WitnessFn>
  bool record(Real margin, WitnessFn&& witness_fn) {
    ++trials;
    const bool ok = !std::isnan(margin) && margin >= -tolerance;
    if (std::isnan(margin))
      worst_margin = -std::numeric_limits<Real>::infinity();
    else
      worst_margin = std::min(worst_margin, margin);
    if (!ok) {
      ++failures;
      if (witness.is_null()) witness = witness_fn();
    }
    return ok;
  }

  bool record(Real margin) {
    return record(margin, [] { return nlohmann::json(); });
  }

  void skip() { ++skipped; }

  /// Folds another batch of the same property into this one.
  void absorb(const VerificationReport& other) {
    trials += other.trials;
    failures += other.failures;
    skipped += other.skipped;
    worst_margin = std::min(worst_margin, other.worst_margin);
    if (witness.is_null() && !other.witness.is_null()) witness = other.witness;
  }
};

/// -|a - b| / (1 + scale)
inline Real identity_margin(Real a, Real b, Real scale) { return -std::abs(a - b) / (1 + std::abs(scale)); }

nlohmann::json to_json(const VerificationReport& r);
VerificationReport report_from_json(const nlohmann::json& j);

}  // namespace csip
