#pragma once

// Seeded property verifiers for the module constructions. Each returns one
// report per property; failures are report entries, never exceptions.

#include <cstdint>
#include <vector>

#include "csip/module.hpp"
#include "csip/report.hpp"

namespace csip {

/// Positivity and definiteness, linearity in the second argument, both
/// module-action identities, scalar compatibility, and Cauchy-Schwarz in
/// operator form |[y,x]|^2 <= ||[y,y]|| [x,x] and scalar form.
std::vector<VerificationReport> verify_axioms(const ModuleDescriptor& desc, int sample_count, std::uint64_t seed,
                                              const NumericPolicy& policy = {});

/// Norm axioms for |||.|||, |||xa||| <= |||x||| ||a||, and |||x[x,x]||| = |||x|||^3.
std::vector<VerificationReport> verify_norm_properties(const ModuleDescriptor& desc, int sample_count,
                                                       std::uint64_t seed, const NumericPolicy& policy = {});

/// rho(xa)^2 = a* rho(x)^2 a, ||rho(x)|| = |||x|||, and on commutative
/// algebras the operator triangle inequality and the cone-norm axioms.
std::vector<VerificationReport> verify_finsler(const ModuleDescriptor& desc, int sample_count, std::uint64_t seed,
                                               const NumericPolicy& policy = {});

/// Whether sample_count random values [x,x] span the self-adjoint part of the algebra.
bool fullness_check(const ModuleDescriptor& desc, int sample_count, std::uint64_t seed,
                    const NumericPolicy& policy = {});
VerificationReport fullness_report(const ModuleDescriptor& desc, int sample_count, std::uint64_t seed,
                                   const NumericPolicy& policy = {});

/// For transported modules: psi([x,y]_A) = [x,y]_B, norm preservation,
/// x.psi(a) = x.a, and the *-isomorphism identities of psi.
std::vector<VerificationReport> verify_transport(const ModuleDescriptor& desc, int sample_count, std::uint64_t seed,
                                                 const NumericPolicy& policy = {});

}  // namespace csip
