#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace csip {

using Real = double;
using Complex = std::complex<Real>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Operands live over different descriptors, or a payload has the wrong shape.
struct StructuralError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A theorem-check was called on inputs that do not meet its hypothesis.
struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Malformed configuration or literal (CLI exit code 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericPolicy {
  Real tol_eq = 1e-9;   // element equality, relative
  Real tol_pos = 1e-9;  // eigenvalue slack, relative to 1 + norm
  Real tol_opt = 1e-8;  // optimizer convergence on alpha

  void validate() const {
    if (!(tol_eq >= 0) || !(tol_pos >= 0) || !(tol_opt >= 0))
      throw DomainError("numeric policy tolerances must be nonnegative");
  }
};

}  // namespace csip
