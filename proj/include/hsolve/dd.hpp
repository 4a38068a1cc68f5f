#pragma once

namespace hsolve {

// Unevaluated double-double sum. Used for the scalar-product reductions so
// that combining two per-executor partials loses (almost) no information
// relative to a single sequential reduction; the solvers rely on this to keep
// their scalar sequences identical across work splits.
//
// The operations below depend on IEEE evaluation order. Do not compile this
// translation unit with value-unsafe FP optimizations (-ffast-math,
// -fassociative-math).
struct Dd {
  double hi = 0.0;
  double lo = 0.0;
};

// Knuth TwoSum: s + err == a + b exactly.
inline Dd two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline Dd dd_add(Dd acc, double x) {
  const Dd t = two_sum(acc.hi, x);
  const double lo = acc.lo + t.lo;
  const double hi = t.hi + lo;
  return {hi, lo - (hi - t.hi)};
}

inline Dd dd_add(Dd a, Dd b) {
  const Dd t = two_sum(a.hi, b.hi);
  const double lo = t.lo + (a.lo + b.lo);
  const double hi = t.hi + lo;
  return {hi, lo - (hi - t.hi)};
}

inline double dd_value(Dd a) { return a.hi + a.lo; }

}  // namespace hsolve
