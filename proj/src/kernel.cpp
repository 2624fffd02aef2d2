#include "ps4/kernel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "ps4/error.hpp"

namespace ps4 {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double s) {
  if (std::abs(s) < 1e-4) return 1.0 - s * s / 6.0;
  return std::sin(s) / s;
}

// CDF of the sum of r independent uniforms on [-h, h], h = b / r.
long double boxcar_sum_cdf(long double s, int r, long double h) {
  long double t = (s + r * h) / (2 * h);  // Irwin-Hall variable on [0, r]
  if (t <= 0) return 0;
  if (t >= r) return 1;
  bool upper = t > r / 2.0L;
  if (upper) t = r - t;
  long double sum = 0;
  long double binom = 1;
  for (int k = 0; k <= static_cast<int>(std::floor(t)); ++k) {
    long double term = binom * std::pow(t - k, static_cast<long double>(r));
    sum += (k % 2 == 0) ? term : -term;
    binom = binom * (r - k) / (k + 1);
  }
  long double fact = std::tgamma(static_cast<long double>(r) + 1);
  long double cdf = sum / fact;
  return upper ? 1 - cdf : cdf;
}

}  // namespace

KernelParams KernelParams::make(double a, double b, int r) {
  if (!(b > 0) || !(b < a / 4)) throw DomainError("kernel needs 0 < b < a/4");
  if (r < 1) throw DomainError("kernel order r must be at least 1");
  return {a, b, r};
}

KernelParams KernelParams::for_window(double eps, double X) {
  if (!(eps > 0)) throw DomainError("window must be positive");
  if (!(X > std::numbers::e)) throw DomainError("X too small for r = floor(ln X) >= 1");
  return make(0.9 * eps, 0.1 * eps, static_cast<int>(std::floor(std::log(X))));
}

double phi_hat(double x, const KernelParams& p) {
  if (x == 0.0) return 2.0 * p.a;
  double head = std::sin(2.0 * kPi * p.a * x) / (kPi * x);
  double s = sinc(2.0 * kPi * p.b * x / p.r);
  return head * std::pow(s, p.r);
}

double phi_hat_bound(double x, const KernelParams& p) {
  double ax = std::abs(x);
  if (ax == 0.0) return 2.0 * p.a;
  double inv = 1.0 / (kPi * ax);
  double ratio = p.r / (2.0 * kPi * ax * p.b);
  double third = inv * std::exp(p.r * std::log(ratio));
  return std::min({2.0 * p.a, inv, third});
}

double phi(double y, const KernelParams& p) {
  if (p.r > kMaxDirectPhiOrder)
    throw DomainError("direct phi evaluation supports r <= 25; use phi_hat for r = " + std::to_string(p.r));
  // b < a/4 keeps the two ramps apart, so phi(y) = H(a - |y|).
  long double h = static_cast<long double>(p.b) / p.r;
  return static_cast<double>(boxcar_sum_cdf(p.a - std::abs(static_cast<long double>(y)), p.r, h));
}

KernelReport kernel_check(const KernelParams& p, const KernelGrid& grid) {
  KernelReport rep;
  rep.samples = grid.samples;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  const double slack = grid.ulp_slack * std::numeric_limits<double>::epsilon();
  const double log_lo = std::log(grid.x_min);
  const double log_hi = std::log(grid.x_max);
  for (std::size_t i = 0; i < grid.samples; ++i) {
    double frac = grid.samples == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(grid.samples - 1);
    double x = std::exp(log_lo + frac * (log_hi - log_lo));
    double v = std::abs(phi_hat(x, p));
    double bound = phi_hat_bound(x, p);
    double excess = bound > 0 ? v / bound - 1.0 : (v > 0 ? std::numeric_limits<double>::infinity() : -1.0);
    if (excess > rep.max_violation) {
      rep.max_violation = excess;
      rep.argmax_x = x;
    }
    if (excess > slack) ++rep.bound_violations;
    if (phi_hat(-x, p) != phi_hat(x, p)) ++rep.parity_violations;
  }

  if (p.r > kMaxDirectPhiOrder || grid.phi_samples < 2) return rep;
  rep.phi_checked = true;
  rep.phi_samples = grid.phi_samples;
  const double reach = 1.25 * (p.a + p.b);
  double prev = 0.0;
  double prev_y = -reach;
  for (std::size_t i = 0; i < grid.phi_samples; ++i) {
    double y = -reach + 2.0 * reach * static_cast<double>(i) / static_cast<double>(grid.phi_samples - 1);
    double v = phi(y, p);
    double ay = std::abs(y);
    if (ay <= p.a - p.b) {
      rep.plateau_error = std::max(rep.plateau_error, std::abs(v - 1.0));
    } else if (ay >= p.a + p.b) {
      rep.support_error = std::max(rep.support_error, std::abs(v));
    } else if (v < -1e-12 || v > 1.0 + 1e-12) {
      ++rep.transition_violations;
    }
    if (i > 0) {
      bool rising = y <= 0.0 && prev_y < 0.0;
      bool falling = prev_y >= 0.0;
      if (rising && v < prev - 1e-12) ++rep.monotonicity_violations;
      if (falling && v > prev + 1e-12) ++rep.monotonicity_violations;
    }
    prev = v;
    prev_y = y;
  }
  return rep;
}

}  // namespace ps4
