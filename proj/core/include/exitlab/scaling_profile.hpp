#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace exitlab {

enum class ProfileFamily { Stable, GeometricLike, LogCounterexample, UserTable };

std::string to_string(ProfileFamily f);

struct TableKnot {
  double u = 0.0;
  double l = 0.0;
};

/// Optional lower-scaling constants: l(v)/l(u) >= c_L (v/u)^{-gamma} for
/// 0 < u <= v < R0, with gamma in (0,2).
struct LowerScaling {
  double c_L = 1.0;
  double gamma = 1.0;
};

/// The radial scaling function l on (0, R0) together with its integral
/// transforms
///   L(r)      = int_r^R0 u^-1 l(u) du          (upper-tail log integral)
///   Ltilde(r) = r^-2 int_0^r u l(u) du         (second-moment average)
/// Closed forms are used where the family admits them; otherwise adaptive
/// quadrature at rel. tol 1e-10 (L) and 1e-8 (Ltilde head).
class ScalingProfile {
 public:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  /// l(u) = u^-alpha, alpha in (0,2).  Declares lower scaling (1, alpha).
  static ScalingProfile stable(double alpha, double R0 = kInfinity, double R = 1.0);

  /// l(u) = u^-alpha (ln 1/u)^p; regularly varying with a slowly varying
  /// factor.  Requires R0 < 1.  Declares an empirical lower-scaling pair.
  static ScalingProfile geometric_like(double alpha, double p = 1.0, double R0 = 0.5,
                                       double R = 0.25);

  /// l(u) = u^-2 (ln 1/u)^-2; the profile for which the L2 comparison fails.
  static ScalingProfile log_counterexample(double R0 = 0.3, double R = 0.15);

  /// Piecewise log-linear interpolation through strictly increasing knots in
  /// (0, R0); extrapolated beyond the end knots with the boundary slopes.
  static ScalingProfile user_table(std::vector<TableKnot> knots, double R0, double R);

  ProfileFamily family() const { return family_; }
  double alpha() const { return alpha_; }
  double slowly_varying_power() const { return p_; }
  double R0() const { return R0_; }
  double R() const { return R_; }
  bool has_closed_L() const;
  bool has_closed_Ltilde() const;

  const std::optional<LowerScaling>& lower_scaling() const { return lower_scaling_; }
  void declare_lower_scaling(double c_L, double gamma);

  /// l(u); domain error outside (0, R0).
  double l(double u) const;

  /// L(r); domain error outside (0, R0].
  double L(double r) const;

  /// Ltilde(r); domain error outside (0, R0).  Throws IntegralDivergence when
  /// the head integral does not converge (profile violates the kernel
  /// integrability assumption).
  double Ltilde(double r) const;

  /// int_0^r u l(u) du = r^2 Ltilde(r).
  double head_integral(double r) const;

  /// Monotone inverse of L: returns r with |L(r) - t| <= 1e-9 t.  Domain
  /// error when t is outside (L(R0), L(r_min_numeric)).
  double invert_L(double t) const;

  /// Quadrature-only evaluation paths (bypass closed forms) for cross-checks.
  double L_quadrature(double r) const;
  double head_integral_quadrature(double r) const;

 private:
  ScalingProfile() = default;

  double table_l(double u) const;
  double table_L(double r) const;
  double table_head(double r) const;
  double table_invert_L(double t) const;

  ProfileFamily family_ = ProfileFamily::Stable;
  double alpha_ = 1.0;
  double p_ = 0.0;
  double R0_ = kInfinity;
  double R_ = 1.0;
  std::optional<LowerScaling> lower_scaling_;

  // user-table state
  std::vector<TableKnot> knots_;       // strictly increasing in u
  std::vector<double> seg_slope_;      // slope of ln l vs ln u per segment
  std::vector<double> knot_L_;         // L at each knot (precomputed)
  double L_at_R0_ = 0.0;               // always 0 by definition, kept for clarity
};

/// n log-spaced points in [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

struct LConditionInputs {
  double c1 = 2.0;
  double c2 = 2.0;
  double c3 = 2.0;
  double K0 = 2.0;
  int d = 1;
};

/// Grid evidence for the scaling conditions.  Verdicts are grid statements,
/// not proofs: worst observed ratios are reported so callers can judge the
/// margin.
struct LConditionWitness {
  LConditionInputs inputs;
  std::vector<double> grid;
  double worst_ratio_l1 = 0.0;
  double worst_ratio_l2 = 0.0;
  double worst_ratio_l3 = 0.0;
  bool l1_ok = false;
  bool l2_ok = false;
  bool l3_ok = false;
  bool L_divergence_trend_ok = false;  // the "L(0) = inf" part of the L2 condition
  std::string note;

  bool all_ok() const { return l1_ok && l2_ok && l3_ok; }
};

/// Evaluates both L1 inequalities, the L2 ratio + divergence trend, and the
/// single L3 inequality on a grid (>= 50 log-spaced radii by default).
LConditionWitness check_L_conditions(const ScalingProfile& profile, const LConditionInputs& in,
                                     std::vector<double> grid = {});

/// C4 = 1 + c1 + c3 (doubling constant for L).
double doubling_constant(double c1, double c3);

/// Worst observed L(r/2)/L(r) over the grid; the doubling claim states this
/// stays below doubling_constant(c1, c3).
double doubling_worst_ratio(const ScalingProfile& profile, std::vector<double> grid = {});

/// c = a^-1 c_L^-2 gamma/(2-gamma), a = 1 - (R/R0)^gamma (a = 1 for infinite
/// R0).  Guarantees int_0^r u l(u) du <= c r^2 L(r) for lower-scaling
/// profiles.
double derive_c2_from_l2(double c_L, double gamma, double R, double R0);

/// Grid estimate of the best lower-scaling constant c_L for a fixed gamma
/// (90% of the worst observed pair ratio, as a safety margin).
double estimate_lower_scaling_constant(const ScalingProfile& profile, double gamma,
                                       std::vector<double> grid = {});

}  // namespace exitlab
