#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace exitlab {

/// z-scores used throughout: 99% two-sided intervals and a "3 sigma" level
/// for pass/fail allowances.
inline constexpr double kZ99 = 2.5758293035489004;
inline constexpr double kZ3Sigma = 3.0;

/// Numerically careful sum: pairwise (cascade) summation.  Deterministic for
/// a given input order.
double pairwise_sum(std::span<const double> xs);

struct MeanCI {
  double mean = 0.0;
  double stddev = 0.0;
  double half_width99 = 0.0;  // z99 * stddev / sqrt(n)
  std::int64_t n = 0;

  double lower() const { return mean - half_width99; }
  double upper() const { return mean + half_width99; }
};

MeanCI mean_ci(std::span<const double> xs);

/// Wilson score interval bounds for a binomial proportion; robust near 0/1.
double wilson_lower(std::int64_t successes, std::int64_t n, double z = kZ99);
double wilson_upper(std::int64_t successes, std::int64_t n, double z = kZ99);

/// Normal-approximation half width for a proportion (used as a noise floor
/// for small masses, never below 1/(2n)).
double binomial_half_width(double p_hat, std::int64_t n, double z = kZ99);

/// Two-sample Kolmogorov-Smirnov distance; inputs need not be sorted.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Critical KS distance at the ~3-sigma level (alpha = 0.0027):
/// lambda * sqrt((n+m)/(n m)) with lambda = 1.82 from the Kolmogorov tail.
double ks_two_sample_allowance(std::int64_t n, std::int64_t m);

/// One-sample KS distance against a CDF.
double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
  double residual_rms = 0.0;
  std::int64_t n = 0;
};

/// Ordinary least squares y = intercept + slope * x with classic standard
/// errors (requires n >= 3 for the error estimates; n >= 2 for the fit).
LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

}  // namespace exitlab
