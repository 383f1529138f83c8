#pragma once

#include <cmath>

namespace pvchart::detail {

// Unevaluated double-double (hi + lo with |lo| <= ulp(hi)/2). Roughly 31
// significant digits; enough headroom for the alternating subset sums in the
// smoothed-uniform distribution evaluation.
struct DD {
  double hi = 0.0;
  double lo = 0.0;

  DD() = default;
  DD(double h) : hi(h), lo(0.0) {}
  DD(double h, double l) : hi(h), lo(l) {}

  double value() const { return hi + lo; }
};

inline DD two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return DD(s, (a - (s - bb)) + (b - bb));
}

inline DD quick_two_sum(double a, double b) {  // requires |a| >= |b|
  const double s = a + b;
  return DD(s, b - (s - a));
}

inline DD two_prod(double a, double b) {
  const double p = a * b;
  return DD(p, std::fma(a, b, -p));
}

inline DD dd_add(const DD& x, const DD& y) {
  DD s = two_sum(x.hi, y.hi);
  DD t = two_sum(x.lo, y.lo);
  s.lo += t.hi;
  s = quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline DD dd_neg(const DD& x) { return DD(-x.hi, -x.lo); }

inline DD dd_sub(const DD& x, const DD& y) { return dd_add(x, dd_neg(y)); }

inline DD dd_mul(const DD& x, const DD& y) {
  DD p = two_prod(x.hi, y.hi);
  p.lo += x.hi * y.lo + x.lo * y.hi;
  return quick_two_sum(p.hi, p.lo);
}

inline DD dd_div(const DD& x, const DD& y) {
  const double q1 = x.hi / y.hi;
  DD r = dd_sub(x, dd_mul(DD(q1), y));
  const double q2 = r.hi / y.hi;
  r = dd_sub(r, dd_mul(DD(q2), y));
  const double q3 = r.hi / y.hi;
  DD q = quick_two_sum(q1, q2);
  return dd_add(q, DD(q3));
}

inline DD dd_npow(DD x, int n) {
  DD acc(1.0);
  while (n > 0) {
    if (n & 1) acc = dd_mul(acc, x);
    x = dd_mul(x, x);
    n >>= 1;
  }
  return acc;
}

}  // namespace pvchart::detail
