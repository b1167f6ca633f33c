#pragma once

#include <array>
#include <cmath>

namespace exitlab {

/// Point in R^d, d <= 3.  Unused trailing coordinates must stay zero.
using Point = std::array<double, 3>;

inline constexpr Point origin() { return {0.0, 0.0, 0.0}; }

inline double dot(const Point& a, const Point& b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Point& a, int d) { return std::sqrt(dot(a, a, d)); }

inline Point sub(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Point add(const Point& a, const Point& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Point scale(const Point& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

inline double dist(const Point& a, const Point& b, int d) { return norm(sub(a, b), d); }

/// Open Euclidean ball B(center, radius).
struct Ball {
  Point center{0.0, 0.0, 0.0};
  double radius = 1.0;

  bool contains(const Point& p, int d) const { return dist(p, center, d) < radius; }
};

/// Annulus V_{r_outer} \ V_{r_inner} around a common center.
struct AnnulusSpec {
  Point center{0.0, 0.0, 0.0};
  double r_inner = 0.0;
  double r_outer = 0.0;
};

/// Annular sector relative to some ball center: radial band [r_lo, r_hi)
/// intersected with the direction cone {unit dir . axis >= cos_cap}.
/// cos_cap = -1 keeps the full annulus; in 1d, axis = (+-1,0,0) with
/// cos_cap > 0 selects one side.
struct AnnularSector {
  double r_lo = 0.0;
  double r_hi = 0.0;
  Point axis{1.0, 0.0, 0.0};
  double cos_cap = -1.0;

  bool contains(const Point& p, const Point& center, int d) const {
    const Point v = sub(p, center);
    const double r = norm(v, d);
    if (r < r_lo || r >= r_hi) return false;
    if (cos_cap <= -1.0) return true;
    if (r == 0.0) return false;
    return dot(v, axis, d) >= cos_cap * r;
  }
};

}  // namespace exitlab
