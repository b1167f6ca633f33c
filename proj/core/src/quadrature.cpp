#include "exitlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "exitlab/errors.hpp"

namespace exitlab {

namespace {

// QUADPACK QK15 nodes/weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15_segment(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  // index layout: 0..6 -> -x[0..6], 7 -> centre, 8..14 -> +x[6..0]
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double kron = kWgk[7] * fv[7];
  double gauss = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    kron += kWgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) gauss += kWg[i / 2] * (fv[i] + fv[14 - i]);
  }
  Segment s;
  s.a = a;
  s.b = b;
  s.value = kron * h;
  const double diff = std::abs((kron - gauss) * h);
  // QUADPACK-style sharpened error estimate.
  double resasc = 0.0;
  const double mean = kron * 0.5;
  for (int i = 0; i < 7; ++i) resasc += kWgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));
  resasc += kWgk[7] * std::abs(fv[7] - mean);
  resasc *= std::abs(h);
  double err = diff;
  if (resasc != 0.0 && diff != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * diff / resasc, 1.5));
  s.error = err;
  return s;
}

}  // namespace

double integrate_gk15(const Integrand& f, double a, double b, const QuadratureOptions& opt) {
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw std::invalid_argument("integrate_gk15: a > b");
  }
  std::priority_queue<Segment> heap;
  Segment first = gk15_segment(f, a, b);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  int n_segments = 1;
  while (total_err > opt.rel_tol * std::max(std::abs(total), opt.abs_floor)) {
    if (n_segments >= opt.max_segments) {
      std::ostringstream msg;
      msg << "integrate_gk15: tolerance " << opt.rel_tol << " not reached on [" << a << ", " << b
          << "] after " << n_segments << " segments (value~" << total << ", err~" << total_err
          << ")";
      throw NumericalError(msg.str());
    }
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      // interval at machine resolution; accept its estimate as-is
      total_err -= worst.error;
      continue;
    }
    Segment left = gk15_segment(f, worst.a, mid);
    Segment right = gk15_segment(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++n_segments;
  }
  return total;
}

double integrate_log(const Integrand& f, double a, double b, const QuadratureOptions& opt) {
  if (!(0.0 < a && a <= b)) throw std::invalid_argument("integrate_log: need 0 < a <= b");
  if (a == b) return 0.0;
  auto g = [&f](double v) {
    const double u = std::exp(v);
    return f(u) * u;
  };
  return integrate_gk15(g, std::log(a), std::log(b), opt);
}

namespace {

// Shared octave-block driver; dir = -1 extends toward zero, +1 toward infinity.
double integrate_blocks(const Integrand& f, double edge, int dir, const QuadratureOptions& opt) {
  const double kBlockFactor = 4.0;
  const int kMaxBlocks = 3000;
  const int kStallWindow = 50;
  QuadratureOptions block_opt = opt;
  block_opt.max_segments = std::max(200, opt.max_segments / 10);

  double accum = 0.0;
  double prev_block = -1.0;
  int converged_streak = 0;
  int stall_streak = 0;
  double lo = edge, hi = edge;
  for (int m = 0; m < kMaxBlocks; ++m) {
    if (dir < 0) {
      hi = lo;
      lo = hi / kBlockFactor;
      if (lo < 1e-308) break;  // measurable support exhausted
    } else {
      lo = hi;
      hi = lo * kBlockFactor;
      if (hi > 1e308) break;
    }
    const double block = integrate_log(f, lo, hi, block_opt);
    accum += block;
    const double scale = std::max(std::abs(accum), opt.abs_floor);
    if (std::abs(block) <= 0.25 * opt.rel_tol * scale) {
      if (++converged_streak >= 2) return accum;
    } else {
      converged_streak = 0;
    }
    if (prev_block > 0.0 && std::abs(block) >= 0.97 * prev_block) {
      if (++stall_streak >= kStallWindow) {
        std::ostringstream msg;
        msg << "improper integral: blocks near " << (dir < 0 ? lo : hi)
            << " fail to decay geometrically (divergent or too slow for tol " << opt.rel_tol
            << ")";
        throw IntegralDivergence(msg.str());
      }
    } else {
      stall_streak = 0;
    }
    prev_block = std::abs(block);
  }
  if (converged_streak >= 1) return accum;
  throw IntegralDivergence("improper integral: block budget exhausted before convergence");
}

}  // namespace

double integrate_to_zero(const Integrand& f, double b, const QuadratureOptions& opt) {
  if (!(b > 0.0)) throw std::invalid_argument("integrate_to_zero: need b > 0");
  return integrate_blocks(f, b, -1, opt);
}

double integrate_to_infinity(const Integrand& f, double a, const QuadratureOptions& opt) {
  if (!(a > 0.0)) throw std::invalid_argument("integrate_to_infinity: need a > 0");
  return integrate_blocks(f, a, +1, opt);
}

namespace {

double simpson_rule(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

double simpson_rec(const Integrand& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_rule(fa, flm, fm, m - a);
  const double right = simpson_rule(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth >= max_depth) throw NumericalError("integrate_simpson: max depth reached");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double integrate_simpson(const Integrand& f, double a, double b, double rel_tol, int max_depth) {
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw std::invalid_argument("integrate_simpson: a > b");
  }
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = simpson_rule(fa, fm, fb, b - a);
  const double tol = rel_tol * std::max(std::abs(whole), 1e-300);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0, max_depth);
}

}  // namespace exitlab
