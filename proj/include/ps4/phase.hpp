#pragma once

// n^c carried as an unevaluated double-double (hi + lo), computed once in
// binary128, so that frac(n^c x) survives |n^c x| well beyond 2^53.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace ps4 {

struct PowDD {
  double hi = 0.0;
  double lo = 0.0;
};

// n^c (n may be any positive real given as double).
PowDD pow_dd(double n, double c);

// (v.hi + v.lo) * x reduced to [-1/2, 1/2].
inline double phase_frac(const PowDD& v, double x) {
  const double s = v.hi * x;
  double e = std::fma(v.hi, x, -s);  // exact: v.hi*x = s + e
  double t = v.lo * x;
  double f = s - std::nearbyint(s);
  e -= std::nearbyint(e);
  t -= std::nearbyint(t);
  f += e + t;
  return f - std::nearbyint(f);
}

// e(theta) = exp(2 pi i theta)
inline std::complex<double> unit(double theta) {
  const double w = 2.0 * std::numbers::pi * theta;
  return {std::cos(w), std::sin(w)};
}

}  // namespace ps4
