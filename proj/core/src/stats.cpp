#include "exitlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exitlab {

double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

MeanCI mean_ci(std::span<const double> xs) {
  MeanCI out;
  out.n = static_cast<std::int64_t>(xs.size());
  if (out.n == 0) return out;
  out.mean = pairwise_sum(xs) / static_cast<double>(out.n);
  if (out.n == 1) return out;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = xs[i] - out.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(out.n - 1);
  out.stddev = std::sqrt(var);
  out.half_width99 = kZ99 * out.stddev / std::sqrt(static_cast<double>(out.n));
  return out;
}

double wilson_lower(std::int64_t successes, std::int64_t n, double z) {
  if (n <= 0) return 0.0;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = p + z2 / (2.0 * nn);
  const double margin = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return std::max(0.0, (centre - margin) / denom);
}

double wilson_upper(std::int64_t successes, std::int64_t n, double z) {
  if (n <= 0) return 1.0;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = p + z2 / (2.0 * nn);
  const double margin = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  return std::min(1.0, (centre + margin) / denom);
}

double binomial_half_width(double p_hat, std::int64_t n, double z) {
  if (n <= 0) return 1.0;
  const double nn = static_cast<double>(n);
  const double var = std::max(p_hat * (1.0 - p_hat), 0.25 / nn) / nn;
  return z * std::sqrt(var);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_two_sample_allowance(std::int64_t n, std::int64_t m) {
  // P(K > 1.82) ~ 0.0027 for the Kolmogorov distribution.
  const double lambda = 1.82;
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return lambda * std::sqrt((nn + mm) / (nn * mm));
}

double ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("linear_fit: size mismatch");
  LinearFit fit;
  fit.n = static_cast<std::int64_t>(xs.size());
  if (fit.n < 2) throw std::invalid_argument("linear_fit: need at least 2 points");
  const double n = static_cast<double>(fit.n);
  const double mx = pairwise_sum(xs) / n;
  const double my = pairwise_sum(ys) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    sxx += dx * dx;
    sxy += dx * (ys[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("linear_fit: degenerate x values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  if (fit.n > 2) {
    const double s2 = ss_res / (n - 2.0);
    fit.slope_stderr = std::sqrt(s2 / sxx);
    double sx2 = 0.0;
    for (double x : xs) sx2 += x * x;
    fit.intercept_stderr = std::sqrt(s2 * sx2 / (n * sxx));
    fit.residual_rms = std::sqrt(s2);
  }
  return fit;
}

}  // namespace exitlab
