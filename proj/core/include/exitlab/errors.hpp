#pragma once

#include <stdexcept>
#include <string>

namespace exitlab {

/// Numerical failure (quadrature non-convergence, degenerate solve, ...).
/// Carries a human-readable diagnostic in what().
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An improper integral failed to converge; the integrand is (numerically)
/// not integrable.  Checkers catch this and turn it into a failed verdict.
class IntegralDivergence : public NumericalError {
 public:
  explicit IntegralDivergence(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace exitlab
