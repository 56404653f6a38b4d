#pragma once

// Birkhoff-James orthogonality in a C*-s.i.p. module and the executable forms
// of the orthogonality results: s.i.p.-orthogonality implies BJ-orthogonality,
// continuity of the pairing, and the converse under the self-adjoint
// hypothesis.

#include <cstdint>
#include <vector>

#include "json.hpp"

#include "csip/module.hpp"
#include "csip/report.hpp"

namespace csip {

struct BJResult {
  Complex alpha_star{0};
  Real min_norm = 0;
  Real base_norm = 0;
  bool is_orthogonal = true;
};

/// 1e-7 (1 + |||x|||)
Real orthogonality_tolerance(Real base_norm);

/// Minimizes a -> |||x + a y||| over complex a. The minimizer lies in the disk
/// of radius 2|||x|||/|||y||| + 1; the search is a polar grid followed by
/// nested Brent minimization over the real and imaginary parts, which is exact
/// for this convex objective up to the step tolerance.
BJResult bj_minimize(const ModuleElement& x, const ModuleElement& y, const NumericPolicy& policy = {});

/// Runs bj_minimize on an s.i.p.-orthogonal pair. Throws PreconditionError if
/// ||[x,y]|| exceeds tol_eq (1 + |||x||| |||y|||).
bool thm31_check(const ModuleElement& x, const ModuleElement& y, const NumericPolicy& policy = {});

/// Random y with [x, y] = 0, built blockwise: projection onto the kernel of the
/// Giles functional of each fiber, onto ker(x*) for matrix blocks.
ModuleElement sip_orthogonal_complement_sample(const ModuleElement& x, std::uint64_t seed,
                                               const NumericPolicy& policy = {});

/// 1e-1, 1e-2, ..., 1e-6
std::vector<Real> default_continuity_grid();

/// delta(t) = ||re[x + t y, y] - re[x, y]|| along a decreasing grid; true when
/// delta is non-increasing over the second half of the grid and delta at the
/// finest t is within 1e-4 (1 + |||x||| |||y|||). Grids that do not reach
/// t <= 1e-4 with at least three points are insufficient evidence (false).
bool continuity_check(const ModuleElement& x, const ModuleElement& y, const std::vector<Real>& t_grid,
                      const NumericPolicy& policy = {});
bool continuity_check(const ModuleElement& x, const ModuleElement& y, const NumericPolicy& policy = {});

/// |||x + t y||| [x,x]^{1/2} <= [x + t y, x + t y]. Throws PreconditionError if
/// [x, y] is not self-adjoint.
bool thm34_hypothesis(const ModuleElement& x, const ModuleElement& y, Real t, const NumericPolicy& policy = {});

/// 0 and +-10^{k/2} for k = -6..2, unioned with the same grid scaled by
/// |||x|||/|||y||| when both are nonzero.
std::vector<Real> thm34_default_grid(const ModuleElement& x, const ModuleElement& y);

/// One pair: vacuous (skipped) unless the hypothesis holds at every t of the
/// grid, otherwise asserts ||[x,y]|| <= 1e-3 (1 + |||x||| |||y|||).
VerificationReport thm34_check(const ModuleElement& x, const ModuleElement& y, const std::vector<Real>& t_grid,
                               const NumericPolicy& policy = {});

/// Orthogonality suite: the s.i.p.-to-BJ implication on constructed pairs,
/// convexity of the objective, scale invariance of the decision, continuity.
std::vector<VerificationReport> verify_orthogonality(const ModuleDescriptor& desc, int sample_count,
                                                     std::uint64_t seed, const NumericPolicy& policy = {});

/// Self-adjoint pairs through thm34_check; vacuous pairs are counted as skipped.
VerificationReport verify_thm34(const ModuleDescriptor& desc, int sample_count, std::uint64_t seed,
                                const NumericPolicy& policy = {});

/// Budgeted search outcome. The witness carries the construction and the
/// element literals so it can be re-checked without the search.
struct WitnessSearch {
  bool applicable = true;
  bool found = false;
  int trials_used = 0;
  Real value = 0;
  nlohmann::json witness;
  std::string note;
};

/// x BJ-orthogonal to y with ||[x,y]|| > threshold |||x||| |||y|||. Only
/// meaningful over commutative algebras (bundles, sums and transports of them).
WitnessSearch search_bj_converse_witness(const ModuleDescriptor& desc, int trials, std::uint64_t seed,
                                         Real threshold = 0.1, const NumericPolicy& policy = {});

/// Unit x, y with ||[x,y] - [y,x]*|| > threshold.
WitnessSearch search_hermitian_defect_witness(const ModuleDescriptor& desc, int trials, std::uint64_t seed,
                                              Real threshold = 0.1);

nlohmann::json to_json(const BJResult& r);

}  // namespace csip
