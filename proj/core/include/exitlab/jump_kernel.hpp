#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "exitlab/geometry.hpp"
#include "exitlab/rng.hpp"
#include "exitlab/scaling_profile.hpp"

namespace exitlab {

enum class KernelMode { Levy, Perturbed };

/// What happens to jumps at radius >= R0.  Truncation makes the rate of
/// jumps above eps exactly kappa_d * L(eps); the exponential tail keeps the
/// global integrability of the kernel exercised separately.
struct TailPolicy {
  enum class Kind { TruncateAtR0, ExponentialTail };
  Kind kind = Kind::TruncateAtR0;
  double lambda = 1.0;

  static TailPolicy truncate() { return TailPolicy{Kind::TruncateAtR0, 0.0}; }
  static TailPolicy exponential(double lambda) { return TailPolicy{Kind::ExponentialTail, lambda}; }
};

/// Surface measure of the unit ball boundary: 2, 2*pi, 4*pi for d = 1, 2, 3.
double kappa_d(int d);

/// Isotropic jump kernel K(x,h) built on a reference k(u) = u^-d l(u).
/// Levy mode fixes K(x,h) = k(|h|) (state-independent); perturbed mode
/// multiplies by a measurable kappa(x) in [1/c0, c0] and is sampled by
/// thinning (experimental, excluded from acceptance runs).
class JumpKernel {
 public:
  JumpKernel(int d, ScalingProfile profile, double c0, double K0,
             KernelMode mode = KernelMode::Levy, TailPolicy tail = TailPolicy::truncate());

  int d() const { return d_; }
  double c0() const { return c0_; }
  double K0() const { return K0_; }
  double kappa() const { return kappa_; }
  KernelMode mode() const { return mode_; }
  const TailPolicy& tail_policy() const { return tail_; }
  const ScalingProfile& profile() const { return profile_; }

  /// Reference kernel k(u) = u^-d l(u); domain error outside (0, R0).
  double k(double u) const;

  /// Spatial jump density at distance u from the source (k below R0, the
  /// tail extension above it; zero above R0 under truncation).
  double spatial_density(double u) const;

  /// Radial jump intensity m(u) = kappa_d u^{d-1} * spatial density.
  double radial_intensity(double u) const;

  struct K0Check {
    double value = 0.0;
    bool verdict = false;
    bool divergent = false;
    std::string note;
  };
  /// sup_x int (1 ^ |h|^2) K(x,h) dh compared against the declared K0.
  K0Check check_K0() const;

  /// Total intensity of jumps with |h| > eps: kappa_d L(eps) plus the tail
  /// rate under the exponential policy.  (Levy reference value; perturbed
  /// mode scales it by kappa(x) pointwise.)
  double jump_rate_above(double eps) const;

  /// Intensity of jumps landing beyond R0 (0 under truncation).
  double tail_rate() const;

  /// Analytic radius CDF of sample_jump, for oracle tests.
  double radius_cdf(double eps, double u) const;

  /// Draws a jump vector with |h| > eps: radius by inverse CDF through the
  /// monotone L table (closed-form inverse where the family has one),
  /// direction uniform on the sphere.  Consumes a fixed number of draws per
  /// call: radius draw(s) first, then the direction.
  Point sample_jump(double eps, SplitMix64& rng) const;
  double sample_radius(double eps, SplitMix64& rng) const;
  Point sample_direction(SplitMix64& rng) const;

  struct AnnulusMass {
    double closed_form = 0.0;
    double quadrature = 0.0;
  };
  /// mu(S) for S = V_{r_outer} \ V_{r_inner}, where mu has density
  /// k(|z-x0|)/L(|z-x0|): closed form kappa_d ln(L(r_inner)/L(r_outer))
  /// and the direct quadrature of the defining integral.
  AnnulusMass annulus_mu_mass(const AnnulusSpec& ann) const;

  /// int_{|h|<eps} |h|^2 k(|h|) dh = kappa_d int_0^eps u l(u) du
  ///                               = kappa_d eps^2 Ltilde(eps).
  double small_jump_variance(double eps) const;

  /// Perturbation kappa(x) for mode = Perturbed; must take values in
  /// [1/c0, c0].  Defaults to 1.
  void set_perturbation(std::function<double(const Point&)> kap);
  double perturbation(const Point& x) const;

 private:
  void build_inverse_table();
  double invert_L_sampling(double target) const;

  int d_ = 1;
  ScalingProfile profile_;
  double c0_ = 1.1;
  double K0_ = 2.0;
  double kappa_ = 2.0;
  KernelMode mode_ = KernelMode::Levy;
  TailPolicy tail_;
  std::function<double(const Point&)> perturbation_;

  // monotone (ln r, ln L) table for radius inversion on quadrature-backed
  // profiles; closed-form families bypass it
  std::vector<double> table_ln_r_;
  std::vector<double> table_ln_L_;
  double table_r_min_ = 0.0;
};

}  // namespace exitlab
