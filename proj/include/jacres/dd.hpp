#pragma once

#include <cmath>

namespace jacres {

// Double-double value: unevaluated sum hi + lo with |lo| <= ulp(hi)/2.
// Used where Hankel determinants burn more than double's 53 bits.
struct dd {
  double hi = 0.0;
  double lo = 0.0;

  dd() = default;
  dd(double h) : hi(h), lo(0.0) {}
  dd(double h, double l) : hi(h), lo(l) {}

  double value() const { return hi + lo; }
};

namespace ddops {

inline dd two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline dd quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace ddops

inline dd operator+(dd a, dd b) {
  dd s = ddops::two_sum(a.hi, b.hi);
  double lo = s.lo + a.lo + b.lo;
  return ddops::quick_two_sum(s.hi, lo);
}

inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + (-b); }

inline dd operator*(dd a, dd b) {
  dd p = ddops::two_prod(a.hi, b.hi);
  double lo = p.lo + a.hi * b.lo + a.lo * b.hi;
  return ddops::quick_two_sum(p.hi, lo);
}

inline dd operator/(dd a, dd b) {
  double q1 = a.hi / b.hi;
  dd r = a - b * dd(q1);
  double q2 = r.hi / b.hi;
  r = r - b * dd(q2);
  double q3 = r.hi / b.hi;
  dd q = ddops::quick_two_sum(q1, q2);
  return q + dd(q3);
}

inline bool operator<(dd a, dd b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(dd a, dd b) { return b < a; }
inline bool operator<=(dd a, dd b) { return !(b < a); }

inline dd dd_abs(dd a) { return (a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0)) ? -a : a; }

inline dd dd_sqrt(dd a) {
  if (a.hi <= 0.0) return {std::sqrt(a.hi), 0.0};
  double s = std::sqrt(a.hi);
  // One Newton step in dd doubles the digits of the double seed.
  dd s0(s);
  dd r = (s0 + a / s0) * dd(0.5);
  return r;
}

}  // namespace jacres
