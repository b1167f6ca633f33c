#include "exitlab/jump_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "exitlab/errors.hpp"
#include "exitlab/quadrature.hpp"

namespace exitlab {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kTableSize = 4096;
}  // namespace

double kappa_d(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    case 3: return 4.0 * kPi;
    default: throw std::domain_error("kappa_d: dimension must be 1, 2, or 3");
  }
}

JumpKernel::JumpKernel(int d, ScalingProfile profile, double c0, double K0, KernelMode mode,
                       TailPolicy tail)
    : d_(d), profile_(std::move(profile)), c0_(c0), K0_(K0), mode_(mode), tail_(tail) {
  kappa_ = kappa_d(d);
  if (!(c0 > 1.0)) throw std::domain_error("JumpKernel: c0 must lie in (1, inf)");
  if (!(K0 > 1.0)) throw std::domain_error("JumpKernel: K0 must lie in (1, inf)");
  if (tail_.kind == TailPolicy::Kind::ExponentialTail) {
    if (!(tail_.lambda > 0.0)) throw std::domain_error("JumpKernel: tail lambda must be positive");
    if (std::isinf(profile_.R0()))
      throw std::domain_error("JumpKernel: exponential tail requires finite R0");
  }
  if (!profile_.has_closed_L()) build_inverse_table();
}

double JumpKernel::k(double u) const { return std::pow(u, -static_cast<double>(d_)) * profile_.l(u); }

double JumpKernel::tail_rate() const {
  if (tail_.kind != TailPolicy::Kind::ExponentialTail) return 0.0;
  const double R0 = profile_.R0();
  const double edge = R0 * (1.0 - 1e-12);
  const double m_edge = kappa_ * profile_.l(edge) / edge;
  return m_edge / tail_.lambda;
}

double JumpKernel::spatial_density(double u) const {
  const double R0 = profile_.R0();
  if (u <= 0.0) throw std::domain_error("spatial_density: u must be positive");
  if (u < R0) return k(u);
  if (tail_.kind != TailPolicy::Kind::ExponentialTail) return 0.0;
  const double edge = R0 * (1.0 - 1e-12);
  const double m_edge = kappa_ * profile_.l(edge) / edge;
  const double m_u = m_edge * std::exp(-tail_.lambda * (u - R0));
  return m_u / (kappa_ * std::pow(u, static_cast<double>(d_ - 1)));
}

double JumpKernel::radial_intensity(double u) const {
  return kappa_ * std::pow(u, static_cast<double>(d_ - 1)) * spatial_density(u);
}

JumpKernel::K0Check JumpKernel::check_K0() const {
  K0Check out;
  const double R0 = profile_.R0();
  try {
    double value = 0.0;
    // |h| < min(1, R0): weight u^2
    const double small_cap = std::min(1.0, R0) * (R0 <= 1.0 ? (1.0 - 1e-12) : 1.0);
    value += kappa_ * profile_.head_integral(small_cap);
    // 1 <= |h| < R0: weight 1
    if (R0 > 1.0) value += kappa_ * profile_.L(1.0);
    // tail beyond R0
    if (tail_.kind == TailPolicy::Kind::ExponentialTail) {
      const double edge = R0 * (1.0 - 1e-12);
      const double m_edge = kappa_ * profile_.l(edge) / edge;
      const double lam = tail_.lambda;
      if (R0 >= 1.0) {
        value += m_edge / lam;
      } else {
        // int_R0^1 u^2 m(u) du + int_1^inf m(u) du with m(u) = m_edge e^{-lam (u - R0)}
        auto prim = [lam](double u) {
          return -std::exp(-lam * u) * (u * u / lam + 2.0 * u / (lam * lam) + 2.0 / (lam * lam * lam));
        };
        const double scale = m_edge * std::exp(lam * R0);
        value += scale * (prim(1.0) - prim(R0));
        value += m_edge * std::exp(-lam * (1.0 - R0)) / lam;
      }
    }
    if (mode_ == KernelMode::Perturbed) value *= c0_;
    out.value = value;
    out.verdict = value <= K0_;
    if (!out.verdict) {
      std::ostringstream msg;
      msg << "integral " << value << " exceeds declared K0 " << K0_;
      out.note = msg.str();
    }
  } catch (const IntegralDivergence& e) {
    out.value = std::numeric_limits<double>::infinity();
    out.verdict = false;
    out.divergent = true;
    out.note = std::string("small-jump integral divergent: ") + e.what();
  }
  return out;
}

double JumpKernel::jump_rate_above(double eps) const {
  if (!(eps > 0.0 && eps < profile_.R0()))
    throw std::domain_error("jump_rate_above: eps must lie in (0, R0)");
  return kappa_ * profile_.L(eps) + tail_rate();
}

double JumpKernel::radius_cdf(double eps, double u) const {
  const double total = jump_rate_above(eps);
  if (u <= eps) return 0.0;
  const double R0 = profile_.R0();
  if (u < R0) return kappa_ * (profile_.L(eps) - profile_.L(u)) / total;
  if (tail_.kind != TailPolicy::Kind::ExponentialTail) return 1.0;
  return 1.0 - tail_rate() * std::exp(-tail_.lambda * (u - R0)) / total;
}

void JumpKernel::build_inverse_table() {
  const double R0 = profile_.R0();
  const double r_lo = R0 * 1e-9;
  const double r_hi = R0 * (1.0 - 1e-10);
  table_r_min_ = r_lo;
  const int n = static_cast<int>(kTableSize);
  table_ln_r_.resize(n);
  table_ln_L_.resize(n);
  const double llo = std::log(r_lo), lhi = std::log(r_hi);
  for (int i = 0; i < n; ++i) {
    const double lr = llo + (lhi - llo) * i / (n - 1);
    table_ln_r_[i] = lr;
    table_ln_L_[i] = std::log(profile_.L(std::exp(lr)));
  }
}

double JumpKernel::invert_L_sampling(double target) const {
  // table_ln_L_ is strictly decreasing in the index
  const double lt = std::log(target);
  if (lt >= table_ln_L_.front()) return std::exp(table_ln_r_.front());
  if (lt <= table_ln_L_.back()) return std::exp(table_ln_r_.back());
  std::size_t lo = 0, hi = table_ln_L_.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (table_ln_L_[mid] >= lt) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double w = (lt - table_ln_L_[lo]) / (table_ln_L_[hi] - table_ln_L_[lo]);
  return std::exp(table_ln_r_[lo] + w * (table_ln_r_[hi] - table_ln_r_[lo]));
}

double JumpKernel::sample_radius(double eps, SplitMix64& rng) const {
  const double R0 = profile_.R0();
  if (!(eps > 0.0 && eps < R0)) throw std::domain_error("sample_radius: eps must lie in (0, R0)");
  if (!profile_.has_closed_L() && eps < table_r_min_)
    throw std::domain_error("sample_radius: eps below the inversion table range");
  const double L_eps = profile_.L(eps);
  const double body = kappa_ * L_eps;
  const double tail = tail_rate();
  const double q = rng.next_unit();
  if (tail > 0.0 && q * (body + tail) > body) {
    return R0 + rng.next_exp() / tail_.lambda;
  }
  // q rescaled to the body mass keeps one uniform per radius draw
  const double qb = (tail > 0.0) ? q * (body + tail) / body : q;
  const double target = (1.0 - qb) * L_eps;
  if (!(target > 0.0)) return R0 * (1.0 - 1e-12);
  if (profile_.has_closed_L()) return profile_.invert_L(std::min(target, L_eps));
  return invert_L_sampling(std::min(target, L_eps));
}

Point JumpKernel::sample_direction(SplitMix64& rng) const {
  switch (d_) {
    case 1: {
      return {rng.next_unit() < 0.5 ? -1.0 : 1.0, 0.0, 0.0};
    }
    case 2: {
      const double theta = 2.0 * kPi * rng.next_unit();
      return {std::cos(theta), std::sin(theta), 0.0};
    }
    default: {
      const double z = 2.0 * rng.next_unit() - 1.0;
      const double phi = 2.0 * kPi * rng.next_unit();
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      return {s * std::cos(phi), s * std::sin(phi), z};
    }
  }
}

Point JumpKernel::sample_jump(double eps, SplitMix64& rng) const {
  const double r = sample_radius(eps, rng);
  const Point dir = sample_direction(rng);
  return scale(dir, r);
}

JumpKernel::AnnulusMass JumpKernel::annulus_mu_mass(const AnnulusSpec& ann) const {
  if (!(ann.r_inner > 0.0 && ann.r_inner < ann.r_outer && ann.r_outer < profile_.R0()))
    throw std::domain_error("annulus_mu_mass: need 0 < r_inner < r_outer < R0");
  AnnulusMass out;
  out.closed_form = kappa_ * std::log(profile_.L(ann.r_inner) / profile_.L(ann.r_outer));
  QuadratureOptions opt;
  opt.rel_tol = 1e-9;
  auto f = [this](double u) { return profile_.l(u) / (u * profile_.L(u)); };
  out.quadrature = kappa_ * integrate_log(f, ann.r_inner, ann.r_outer, opt);
  return out;
}

double JumpKernel::small_jump_variance(double eps) const {
  if (!(eps > 0.0 && eps < profile_.R0()))
    throw std::domain_error("small_jump_variance: eps must lie in (0, R0)");
  return kappa_ * profile_.head_integral(eps);
}

void JumpKernel::set_perturbation(std::function<double(const Point&)> kap) {
  if (mode_ != KernelMode::Perturbed)
    throw std::logic_error("set_perturbation: kernel is not in perturbed mode");
  perturbation_ = std::move(kap);
}

double JumpKernel::perturbation(const Point& x) const {
  if (mode_ != KernelMode::Perturbed || !perturbation_) return 1.0;
  const double v = perturbation_(x);
  if (!(v >= 1.0 / c0_ - 1e-12 && v <= c0_ + 1e-12)) {
    std::ostringstream msg;
    msg << "perturbation value " << v << " escapes [1/c0, c0] = [" << 1.0 / c0_ << ", " << c0_ << "]";
    throw std::domain_error(msg.str());
  }
  return v;
}

}  // namespace exitlab
