#pragma once

#include <functional>

namespace exitlab {

using Integrand = std::function<double(double)>;

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_floor = 1e-300;  // treat |I| below this as zero for the rel test
  int max_segments = 4000;
};

/// Globally adaptive Gauss7/Kronrod15 on a finite interval.  Throws
/// NumericalError when the segment budget is exhausted before the error
/// estimate meets rel_tol.
double integrate_gk15(const Integrand& f, double a, double b, const QuadratureOptions& opt = {});

/// Same integral evaluated in the log domain: substitutes u = e^v, which
/// tames power-law endpoint behaviour.  Requires 0 < a < b (finite).
double integrate_log(const Integrand& f, double a, double b, const QuadratureOptions& opt = {});

/// Improper head integral over (0, b]: log-domain octave blocks extended
/// toward zero until the remainder is certifiably below tolerance.  Throws
/// IntegralDivergence when blocks fail to decay geometrically.
double integrate_to_zero(const Integrand& f, double b, const QuadratureOptions& opt = {});

/// Improper tail integral over [a, inf); same block scheme toward infinity.
double integrate_to_infinity(const Integrand& f, double a, const QuadratureOptions& opt = {});

/// Independent second rule (adaptive Simpson) for cross-checking the
/// Gauss-Kronrod results.  Deliberately shares no code with integrate_gk15.
double integrate_simpson(const Integrand& f, double a, double b, double rel_tol = 1e-10,
                         int max_depth = 60);

}  // namespace exitlab
