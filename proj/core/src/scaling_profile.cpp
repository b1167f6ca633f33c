#include "exitlab/scaling_profile.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "exitlab/errors.hpp"
#include "exitlab/quadrature.hpp"

namespace exitlab {

namespace {

constexpr double kLTol = 1e-10;
constexpr double kLtildeTol = 1e-8;
constexpr double kInvertTol = 1e-9;

// (b^s - a^s)/s with a stable small-s limit of ln(b/a); requires 0 < a <= b.
double power_diff_over_s(double a, double b, double s) {
  const double lr = std::log(b / a);
  if (std::abs(s) < 1e-12) return std::pow(a, s) * lr * (1.0 + 0.5 * s * lr);
  return std::pow(a, s) * std::expm1(s * lr) / s;
}

}  // namespace

std::string to_string(ProfileFamily f) {
  switch (f) {
    case ProfileFamily::Stable: return "stable";
    case ProfileFamily::GeometricLike: return "geometric-like";
    case ProfileFamily::LogCounterexample: return "log-counterexample";
    case ProfileFamily::UserTable: return "user-table";
  }
  return "?";
}

ScalingProfile ScalingProfile::stable(double alpha, double R0, double R) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::domain_error("stable profile: alpha must be in (0,2)");
  if (!(R0 > 0.0)) throw std::domain_error("stable profile: R0 must be positive");
  if (!(R > 0.0 && R < R0)) throw std::domain_error("stable profile: need 0 < R < R0");
  ScalingProfile p;
  p.family_ = ProfileFamily::Stable;
  p.alpha_ = alpha;
  p.R0_ = R0;
  p.R_ = R;
  p.lower_scaling_ = LowerScaling{1.0, alpha};
  return p;
}

ScalingProfile ScalingProfile::geometric_like(double alpha, double p_exp, double R0, double R) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::domain_error("geometric-like profile: alpha must be in (0,2)");
  if (!(R0 > 0.0 && R0 < 1.0))
    throw std::domain_error("geometric-like profile: R0 must be in (0,1) so ln(1/u) stays positive");
  if (!(R > 0.0 && R < R0)) throw std::domain_error("geometric-like profile: need 0 < R < R0");
  ScalingProfile p;
  p.family_ = ProfileFamily::GeometricLike;
  p.alpha_ = alpha;
  p.p_ = p_exp;
  p.R0_ = R0;
  p.R_ = R;
  const double gamma = std::min(alpha + 0.25, 1.995);
  p.lower_scaling_ = LowerScaling{estimate_lower_scaling_constant(p, gamma), gamma};
  return p;
}

ScalingProfile ScalingProfile::log_counterexample(double R0, double R) {
  if (!(R0 > 0.0 && R0 < 1.0))
    throw std::domain_error("log-counterexample profile: R0 must be in (0,1)");
  if (!(R > 0.0 && R < R0)) throw std::domain_error("log-counterexample profile: need 0 < R < R0");
  ScalingProfile p;
  p.family_ = ProfileFamily::LogCounterexample;
  p.alpha_ = 2.0;  // regular-variation index of u^-2 (ln 1/u)^-2
  p.R0_ = R0;
  p.R_ = R;
  return p;
}

ScalingProfile ScalingProfile::user_table(std::vector<TableKnot> knots, double R0, double R) {
  if (knots.size() < 2) throw std::domain_error("user-table profile: need at least two knots");
  if (!(R0 > 0.0) || std::isinf(R0))
    throw std::domain_error("user-table profile: R0 must be finite and positive");
  if (!(R > 0.0 && R < R0)) throw std::domain_error("user-table profile: need 0 < R < R0");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!(knots[i].u > 0.0 && knots[i].u < R0))
      throw std::domain_error("user-table profile: knot abscissas must lie in (0, R0)");
    if (!(knots[i].l > 0.0)) throw std::domain_error("user-table profile: knot values must be positive");
    if (i > 0 && !(knots[i].u > knots[i - 1].u))
      throw std::domain_error("user-table profile: knots must be strictly increasing");
  }
  ScalingProfile p;
  p.family_ = ProfileFamily::UserTable;
  p.R0_ = R0;
  p.R_ = R;
  p.knots_ = std::move(knots);
  const std::size_t m = p.knots_.size();
  p.seg_slope_.resize(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    p.seg_slope_[i] = std::log(p.knots_[i + 1].l / p.knots_[i].l) /
                      std::log(p.knots_[i + 1].u / p.knots_[i].u);
  }
  // Precompute L at the knots, accumulating segment integrals from R0 down.
  p.knot_L_.assign(m, 0.0);
  {
    const double s_top = p.seg_slope_.back();
    const TableKnot& last = p.knots_.back();
    const double C = last.l * std::pow(last.u, -s_top);
    p.knot_L_[m - 1] = C * power_diff_over_s(last.u, R0, s_top);
  }
  for (std::size_t i = m - 1; i-- > 0;) {
    const double s = p.seg_slope_[i];
    const double C = p.knots_[i].l * std::pow(p.knots_[i].u, -s);
    p.knot_L_[i] = p.knot_L_[i + 1] + C * power_diff_over_s(p.knots_[i].u, p.knots_[i + 1].u, s);
  }
  return p;
}

void ScalingProfile::declare_lower_scaling(double c_L, double gamma) {
  if (!(c_L > 0.0)) throw std::domain_error("lower scaling: c_L must be positive");
  if (!(gamma > 0.0 && gamma < 2.0)) throw std::domain_error("lower scaling: gamma must be in (0,2)");
  lower_scaling_ = LowerScaling{c_L, gamma};
}

bool ScalingProfile::has_closed_L() const {
  return family_ == ProfileFamily::Stable || family_ == ProfileFamily::UserTable;
}

bool ScalingProfile::has_closed_Ltilde() const {
  return family_ == ProfileFamily::Stable || family_ == ProfileFamily::LogCounterexample ||
         family_ == ProfileFamily::UserTable;
}

double ScalingProfile::l(double u) const {
  if (!(u > 0.0 && u < R0_)) {
    std::ostringstream msg;
    msg << "l(u): u=" << u << " outside (0, R0=" << R0_ << ")";
    throw std::domain_error(msg.str());
  }
  switch (family_) {
    case ProfileFamily::Stable:
      return std::pow(u, -alpha_);
    case ProfileFamily::GeometricLike:
      return std::pow(u, -alpha_) * std::pow(std::log(1.0 / u), p_);
    case ProfileFamily::LogCounterexample: {
      const double t = std::log(1.0 / u);
      return 1.0 / (u * u * t * t);
    }
    case ProfileFamily::UserTable:
      return table_l(u);
  }
  throw std::logic_error("unreachable");
}

double ScalingProfile::table_l(double u) const {
  // locate the segment; extrapolate with the boundary slopes outside
  std::size_t i;
  if (u <= knots_.front().u) {
    i = 0;
  } else if (u >= knots_.back().u) {
    i = knots_.size() - 2;
  } else {
    i = static_cast<std::size_t>(
            std::upper_bound(knots_.begin(), knots_.end(), u,
                             [](double x, const TableKnot& k) { return x < k.u; }) -
            knots_.begin()) -
        1;
  }
  const double s = seg_slope_[i];
  return knots_[i].l * std::pow(u / knots_[i].u, s);
}

double ScalingProfile::L(double r) const {
  if (!(r > 0.0 && r <= R0_)) {
    std::ostringstream msg;
    msg << "L(r): r=" << r << " outside (0, R0=" << R0_ << "]";
    throw std::domain_error(msg.str());
  }
  if (r == R0_) return 0.0;
  switch (family_) {
    case ProfileFamily::Stable:
      if (std::isinf(R0_)) return std::pow(r, -alpha_) / alpha_;
      return (std::pow(r, -alpha_) - std::pow(R0_, -alpha_)) / alpha_;
    case ProfileFamily::UserTable:
      return table_L(r);
    default:
      return L_quadrature(r);
  }
}

double ScalingProfile::L_quadrature(double r) const {
  QuadratureOptions opt;
  opt.rel_tol = kLTol;
  auto f = [this](double u) { return l(u) / u; };
  if (std::isinf(R0_)) {
    // split at max(2r, 1) and extend the tail in octave blocks
    const double split = std::max(2.0 * r, 1.0);
    return integrate_log(f, r, split, opt) + integrate_to_infinity(f, split, opt);
  }
  return integrate_log(f, r, R0_, opt);
}

double ScalingProfile::table_L(double r) const {
  const std::size_t m = knots_.size();
  if (r >= knots_.back().u) {
    const double s = seg_slope_.back();
    const double C = knots_.back().l * std::pow(knots_.back().u, -s);
    return C * power_diff_over_s(r, R0_, s);
  }
  std::size_t i;
  if (r < knots_.front().u) {
    const double s = seg_slope_.front();
    const double C = knots_.front().l * std::pow(knots_.front().u, -s);
    return knot_L_[0] + C * power_diff_over_s(r, knots_.front().u, s);
  }
  i = static_cast<std::size_t>(
          std::upper_bound(knots_.begin(), knots_.end(), r,
                           [](double x, const TableKnot& k) { return x < k.u; }) -
          knots_.begin()) -
      1;
  const double s = seg_slope_[i];
  const double C = knots_[i].l * std::pow(knots_[i].u, -s);
  (void)m;
  return knot_L_[i + 1] + C * power_diff_over_s(r, knots_[i + 1].u, s);
}

double ScalingProfile::head_integral(double r) const {
  if (!(r > 0.0 && r < R0_)) {
    std::ostringstream msg;
    msg << "head integral: r=" << r << " outside (0, R0=" << R0_ << ")";
    throw std::domain_error(msg.str());
  }
  switch (family_) {
    case ProfileFamily::Stable:
      return std::pow(r, 2.0 - alpha_) / (2.0 - alpha_);
    case ProfileFamily::LogCounterexample:
      // int_0^r u^-1 (ln 1/u)^-2 du = 1/ln(1/r)
      return 1.0 / std::log(1.0 / r);
    case ProfileFamily::UserTable:
      return table_head(r);
    default:
      return head_integral_quadrature(r);
  }
}

double ScalingProfile::head_integral_quadrature(double r) const {
  QuadratureOptions opt;
  opt.rel_tol = kLtildeTol;
  auto f = [this](double u) { return u * l(u); };
  return integrate_to_zero(f, r, opt);
}

double ScalingProfile::table_head(double r) const {
  // accumulate int_0^r u l(u) du over the piecewise power-law segments
  const double s0 = seg_slope_.front();
  const double C0 = knots_.front().l * std::pow(knots_.front().u, -s0);
  if (s0 + 2.0 <= 0.0) {
    std::ostringstream msg;
    msg << "user-table head integral diverges: extrapolated slope " << s0
        << " <= -2 near zero (int_0 u l(u) du infinite)";
    throw IntegralDivergence(msg.str());
  }
  const double cap = std::min(r, knots_.front().u);
  double total = C0 * std::pow(cap, s0 + 2.0) / (s0 + 2.0);
  if (r <= knots_.front().u) return total;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    if (r <= knots_[i].u) break;
    const double a = knots_[i].u;
    const double b = std::min(r, knots_[i + 1].u);
    if (b <= a) continue;
    const double s = seg_slope_[i];
    const double C = knots_[i].l * std::pow(knots_[i].u, -s);
    total += C * power_diff_over_s(a, b, s + 2.0);
  }
  if (r > knots_.back().u) {
    const double s = seg_slope_.back();
    const double C = knots_.back().l * std::pow(knots_.back().u, -s);
    total += C * power_diff_over_s(knots_.back().u, r, s + 2.0);
  }
  return total;
}

double ScalingProfile::Ltilde(double r) const { return head_integral(r) / (r * r); }

double ScalingProfile::invert_L(double t) const {
  if (!(t > 0.0) || std::isinf(t)) throw std::domain_error("invert_L: t must be positive and finite");
  if (family_ == ProfileFamily::Stable) {
    const double base = t * alpha_ + (std::isinf(R0_) ? 0.0 : std::pow(R0_, -alpha_));
    return std::pow(base, -1.0 / alpha_);
  }
  if (family_ == ProfileFamily::UserTable) return table_invert_L(t);

  // numeric profiles have finite R0 by construction
  double hi = R0_;
  double lo = 0.5 * R0_;
  double L_lo = L(lo);
  int guard = 0;
  while (L_lo < t) {
    hi = lo;
    lo *= 1e-2;
    if (lo < 1e-280 || ++guard > 200) {
      throw std::domain_error("invert_L: t exceeds L on the numerically representable range");
    }
    L_lo = L(lo);
  }
  // bisection in log space; L is strictly decreasing
  double llo = std::log(lo), lhi = std::log(hi);
  double r_mid = lo, L_mid = L_lo;
  for (int it = 0; it < 120; ++it) {
    const double lm = 0.5 * (llo + lhi);
    r_mid = std::exp(lm);
    L_mid = L(r_mid);
    if (std::abs(L_mid - t) <= kInvertTol * t) return r_mid;
    if (L_mid > t) {
      llo = lm;
    } else {
      lhi = lm;
    }
    if (lhi - llo < 1e-15) break;
  }
  if (std::abs(L_mid - t) <= 1e-7 * t) return r_mid;  // flat-L pathologies
  throw NumericalError("invert_L: bisection failed to reach tolerance");
}

double ScalingProfile::table_invert_L(double t) const {
  const std::size_t m = knots_.size();
  auto solve_segment = [](double base_L, double u_hi, double C, double s, double t_target) {
    // t = base_L + C (u_hi^s - r^s)/s  (s != 0);  t = base_L + C ln(u_hi/r)  (s ~ 0)
    const double excess = t_target - base_L;
    if (std::abs(s) < 1e-12) return u_hi * std::exp(-excess / C);
    const double rs = std::pow(u_hi, s) - s * excess / C;
    if (!(rs > 0.0)) throw std::domain_error("invert_L: t outside representable range for table profile");
    return std::pow(rs, 1.0 / s);
  };
  if (t <= knot_L_[m - 1]) {
    // r between the last knot and R0
    const double s = seg_slope_.back();
    const double C = knots_.back().l * std::pow(knots_.back().u, -s);
    return solve_segment(0.0, R0_, C, s, t);
  }
  if (t > knot_L_[0]) {
    // r below the first knot, on the extrapolated head segment
    const double s = seg_slope_.front();
    if (s >= 0.0 && std::abs(s) < 1e-12)
      throw std::domain_error("invert_L: t above sup L for table profile");
    const double C = knots_.front().l * std::pow(knots_.front().u, -s);
    return solve_segment(knot_L_[0], knots_.front().u, C, s, t);
  }
  // knot_L_ is strictly decreasing; find i with knot_L_[i] >= t > knot_L_[i+1]
  std::size_t lo = 0, hi = m - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (knot_L_[mid] >= t) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double s = seg_slope_[lo];
  const double C = knots_[lo].l * std::pow(knots_[lo].u, -s);
  return solve_segment(knot_L_[lo + 1], knots_[lo + 1].u, C, s, t);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("log_grid: need 0 < lo < hi");
  if (n < 2) throw std::invalid_argument("log_grid: need n >= 2");
  std::vector<double> g(static_cast<std::size_t>(n));
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    g[static_cast<std::size_t>(i)] = std::exp(llo + (lhi - llo) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

LConditionWitness check_L_conditions(const ScalingProfile& profile, const LConditionInputs& in,
                                     std::vector<double> grid) {
  if (!(in.c1 > 1.0 && in.c2 > 1.0 && in.c3 > 1.0 && in.K0 > 1.0))
    throw std::domain_error("check_L_conditions: c1, c2, c3, K0 must lie in (1, inf)");
  if (in.d < 1 || in.d > 3) throw std::domain_error("check_L_conditions: d must be 1, 2, or 3");
  LConditionWitness w;
  w.inputs = in;
  if (grid.empty()) grid = log_grid(std::max(1e-8, profile.R() * 1e-8), profile.R(), 50);
  if (grid.size() < 50) throw std::invalid_argument("check_L_conditions: grid needs >= 50 radii");
  std::sort(grid.begin(), grid.end());
  w.grid = grid;

  // (L1): both inequalities.  Halving ratio on the grid; pair ratio over r <= s.
  std::vector<double> lv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) lv[i] = profile.l(grid[i]);
  double worst1 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst1 = std::max(worst1, profile.l(grid[i] / 2.0) / lv[i]);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double denom = std::pow(grid[i], -in.d) * lv[i];
    for (std::size_t j = i; j < grid.size(); ++j)
      worst1 = std::max(worst1, std::pow(grid[j], -in.d) * lv[j] / denom);
  }
  w.worst_ratio_l1 = worst1;
  w.l1_ok = worst1 <= in.c1;

  // (L2): Ltilde/L ratio plus the divergence trend for L(0) = inf.
  try {
    double worst2 = 0.0;
    for (double r : grid) {
      if (!(r < profile.R())) continue;
      worst2 = std::max(worst2, profile.Ltilde(r) / profile.L(r));
    }
    w.worst_ratio_l2 = worst2;
    const double L_R = profile.L(profile.R());
    double prev = L_R;
    bool increasing = true;
    double L_smallest = prev;
    for (int k = 1; k <= 8; ++k) {
      const double Lk = profile.L(profile.R() * std::pow(10.0, -k));
      if (Lk <= prev) increasing = false;
      prev = Lk;
      L_smallest = Lk;
    }
    w.L_divergence_trend_ok = increasing && (L_smallest > 1e3 * L_R);
    w.l2_ok = (worst2 <= in.c2) && w.L_divergence_trend_ok;
    if (!w.L_divergence_trend_ok) w.note = "L(0)=inf divergence trend not observed";
  } catch (const IntegralDivergence& e) {
    w.worst_ratio_l2 = std::numeric_limits<double>::infinity();
    w.l2_ok = false;
    w.L_divergence_trend_ok = false;
    w.note = std::string("Ltilde head integral divergent: ") + e.what();
  }

  // (L3): single inequality at R.
  const double L_R = profile.L(profile.R());
  const double a = std::max(1.0, 1.0 / (profile.R() * profile.R()));
  w.worst_ratio_l3 = (profile.L(profile.R() / 2.0) + a * in.K0) / L_R;
  w.l3_ok = w.worst_ratio_l3 <= in.c3;
  return w;
}

double doubling_constant(double c1, double c3) {
  if (!(c1 > 1.0 && c3 > 1.0)) throw std::domain_error("doubling_constant: need c1, c3 > 1");
  return 1.0 + c1 + c3;
}

double doubling_worst_ratio(const ScalingProfile& profile, std::vector<double> grid) {
  if (grid.empty()) grid = log_grid(std::max(1e-8, profile.R() * 1e-8), profile.R(), 50);
  double worst = 0.0;
  for (double r : grid) {
    if (!(r < profile.R())) continue;
    worst = std::max(worst, profile.L(r / 2.0) / profile.L(r));
  }
  return worst;
}

double derive_c2_from_l2(double c_L, double gamma, double R, double R0) {
  if (!(gamma > 0.0 && gamma < 2.0)) throw std::domain_error("derive_c2_from_l2: gamma must be in (0,2)");
  if (!(c_L > 0.0)) throw std::domain_error("derive_c2_from_l2: c_L must be positive");
  if (!(R > 0.0 && R < R0)) throw std::domain_error("derive_c2_from_l2: need 0 < R < R0");
  const double a = std::isinf(R0) ? 1.0 : 1.0 - std::pow(R / R0, gamma);
  return (1.0 / a) * std::pow(c_L, -2.0) * gamma / (2.0 - gamma);
}

double estimate_lower_scaling_constant(const ScalingProfile& profile, double gamma,
                                       std::vector<double> grid) {
  if (grid.empty()) grid = log_grid(std::max(1e-10, profile.R() * 1e-8), profile.R(), 60);
  std::sort(grid.begin(), grid.end());
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double lu = profile.l(grid[i]);
    for (std::size_t j = i; j < grid.size(); ++j) {
      const double ratio = profile.l(grid[j]) / lu * std::pow(grid[j] / grid[i], gamma);
      worst = std::min(worst, ratio);
    }
  }
  return 0.9 * worst;
}

}  // namespace exitlab
