#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

namespace losssense {

/// Result of locating the switch point of a monotone predicate.
struct Threshold {
  enum class Kind { found, always_true, never_true };
  Kind kind = Kind::found;
  double below = 0.0;  // last point where the predicate is false
  double above = 0.0;  // first point where it is true
};

/// For pred false-then-true in m, bracket inf{m : pred(m)} by doubling out of 0
/// up to |m| <= limit, then bisect to tol * max(1, |m|).
inline Threshold locate_threshold(const std::function<bool(double)>& pred, double limit = 1e12,
                                  double tol = 1e-10) {
  Threshold t;
  double lo, hi;
  if (pred(0.0)) {
    hi = 0.0;
    double step = 1.0;
    lo = -step;
    while (pred(lo)) {
      hi = lo;
      if (step > limit) {
        t.kind = Threshold::Kind::always_true;
        return t;
      }
      step *= 2.0;
      lo = -step;
    }
  } else {
    lo = 0.0;
    double step = 1.0;
    hi = step;
    while (!pred(hi)) {
      lo = hi;
      if (step > limit) {
        t.kind = Threshold::Kind::never_true;
        return t;
      }
      step *= 2.0;
      hi = step;
    }
  }
  for (int it = 0; it < 400; ++it) {
    if (hi - lo <= tol * std::max(1.0, std::abs(hi))) break;
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (pred(mid) ? hi : lo) = mid;
  }
  t.below = lo;
  t.above = hi;
  return t;
}

/// Maximizer of a concave function on [a, b]. Ties shrink to the middle third.
inline double ternary_max(const std::function<double(double)>& h, double a, double b, double tol) {
  for (int it = 0; it < 500 && b - a > tol; ++it) {
    double m1 = a + (b - a) / 3.0;
    double m2 = b - (b - a) / 3.0;
    double h1 = h(m1), h2 = h(m2);
    if (h1 < h2) {
      a = m1;
    } else if (h1 > h2) {
      b = m2;
    } else {
      a = m1;
      b = m2;
    }
  }
  return 0.5 * (a + b);
}

/// Golden-section search for a maximum of a unimodal function on [a, b].
inline double golden_max(const std::function<double(double)>& h, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double hc = h(c), hd = h(d);
  for (int it = 0; it < 500 && b - a > tol; ++it) {
    if (hc >= hd) {
      b = d;
      d = c;
      hd = hc;
      c = b - inv_phi * (b - a);
      hc = h(c);
    } else {
      a = c;
      c = d;
      hc = hd;
      d = a + inv_phi * (b - a);
      hd = h(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace losssense
