#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature for real or complex integrands.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

#include "ps4/error.hpp"

namespace ps4::quad {

struct Tolerance {
  double abs = 0.0;
  double rel = 1e-9;
  std::size_t max_panels = 200000;
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

template <class T>
struct Panel {
  double a, b;
  T value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class T, class F>
Panel<T> gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  T fc = f(center);
  T kronrod = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    T f1 = f(center - dx);
    T f2 = f(center + dx);
    kronrod += (f1 + f2) * kWgk[j];
    if (j % 2 == 1) gauss += (f1 + f2) * kWg[j / 2];
  }
  T value = kronrod * half;
  double err = magnitude((kronrod - gauss) * half);
  return {a, b, value, err};
}

}  // namespace detail

// Integrates f over [a, b]. The interval is first cut at every interior point of
// `breaks` (which must be sorted), so callers can align panels with oscillations.
template <class T, class F>
Result<T> integrate(F&& f, double a, double b, const Tolerance& tol, std::span<const double> breaks = {}) {
  Result<T> out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<detail::Panel<T>> heap;
  T total{};
  double err = 0.0;
  double lo = a;
  auto push = [&](double x0, double x1) {
    auto p = detail::gk15<T>(f, x0, x1);
    out.evaluations += 15;
    total += p.value;
    err += p.error;
    heap.push(p);
  };
  for (double x : breaks) {
    if (x <= lo || x >= b) continue;
    push(lo, x);
    lo = x;
  }
  push(lo, b);

  while (!heap.empty()) {
    double target = std::max(tol.abs, tol.rel * detail::magnitude(total));
    if (err <= target) {
      out.converged = true;
      break;
    }
    if (heap.size() >= tol.max_panels) break;
    auto worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Cannot split further; accept and stop refining this panel.
      out.converged = false;
      break;
    }
    total -= worst.value;
    err -= worst.error;
    push(worst.a, mid);
    push(mid, worst.b);
  }
  // Re-sum to shed cancellation drift from the incremental updates.
  T resum{};
  double reerr = 0.0;
  while (!heap.empty()) {
    resum += heap.top().value;
    reerr += heap.top().error;
    heap.pop();
  }
  out.value = resum;
  out.error = reerr;
  if (!out.converged) out.converged = reerr <= std::max(tol.abs, tol.rel * detail::magnitude(resum));
  return out;
}

// As integrate(), but throws NumericError when the tolerance is not met.
template <class T, class F>
T integrate_or_throw(F&& f, double a, double b, const Tolerance& tol, std::span<const double> breaks = {}) {
  auto r = integrate<T>(std::forward<F>(f), a, b, tol, breaks);
  if (!r.converged)
    throw NumericError("quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                       "] did not converge (error estimate " + std::to_string(r.error) + ")");
  return r.value;
}

}  // namespace ps4::quad
