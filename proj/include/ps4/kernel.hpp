#pragma once

// Smoothing kernel with a plateau: phi = 1 on |y| <= a - b, 0 on |y| >= a + b.
//
// Construction: the indicator of [-a, a] convolved with r boxcars, each the
// uniform density on [-b/r, b/r]. Its Fourier transform is
//
//   Phi(x) = sin(2 pi a x) / (pi x) * sinc(2 pi b x / r)^r,
//
// which gives |Phi| <= min(2a, 1/(pi|x|), (1/(pi|x|)) (r / (2 pi b|x|))^r).
// The construction is r - 1 times continuously differentiable; use
// KernelParams::with_smoothness(a, b, k) for a C^k kernel (r = k + 1 factors).

#include <cstddef>

namespace ps4 {

struct KernelParams {
  double a = 0.0;
  double b = 0.0;
  int r = 1;

  // Throws DomainError unless 0 < b < a/4 and r >= 1.
  static KernelParams make(double a, double b, int r);
  static KernelParams with_smoothness(double a, double b, int order) { return make(a, b, order + 1); }
  // a = 9 eps / 10, b = eps / 10, r = floor(ln X).
  static KernelParams for_window(double eps, double X);
};

inline constexpr int kMaxDirectPhiOrder = 25;

double phi_hat(double x, const KernelParams& p);

// min(2a, 1/(pi|x|), (1/(pi|x|)) (r/(2 pi b|x|))^r)
double phi_hat_bound(double x, const KernelParams& p);

// Exact piecewise-polynomial evaluation; throws DomainError for r > 25, where the
// alternating sum loses too many digits (use phi_hat instead).
double phi(double y, const KernelParams& p);

struct KernelGrid {
  double x_min = 1e-3;
  double x_max = 1e6;
  std::size_t samples = 10000;     // log-spaced |x| values
  std::size_t phi_samples = 1000;  // uniform y values over [-1.25(a+b), 1.25(a+b)]
  double ulp_slack = 4.0;
};

struct KernelReport {
  std::size_t samples = 0;
  double max_violation = 0.0;  // largest |Phi|/bound - 1 over the grid (<= 0 when the bound holds)
  double argmax_x = 0.0;
  std::size_t bound_violations = 0;  // samples beyond ulp_slack
  std::size_t parity_violations = 0;  // Phi(-x) != Phi(x)

  bool phi_checked = false;  // false when r exceeds kMaxDirectPhiOrder
  std::size_t phi_samples = 0;
  double plateau_error = 0.0;  // max |phi - 1| on |y| <= a - b
  double support_error = 0.0;  // max |phi| on |y| >= a + b
  std::size_t transition_violations = 0;  // phi outside [0, 1] on the ramp
  std::size_t monotonicity_violations = 0;

  bool ok() const {
    return bound_violations == 0 && parity_violations == 0 &&
           (!phi_checked || (plateau_error < 1e-9 && support_error < 1e-9 && transition_violations == 0 &&
                             monotonicity_violations == 0));
  }
};

KernelReport kernel_check(const KernelParams& p, const KernelGrid& grid = {});

}  // namespace ps4
