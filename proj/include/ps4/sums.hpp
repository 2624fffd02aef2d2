#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ps4/kernel.hpp"
#include "ps4/phase.hpp"
#include "ps4/rational.hpp"

namespace ps4 {

struct GlobalParams {
  double c = 1.2;
  std::uint64_t X = 1000;
  Rational eta{};

  // Throws DomainError unless 1 < c < 2, X >= 10 and eta >= 0.
  static GlobalParams make(double c, std::uint64_t X, Rational eta = {});

  double tau() const;      // X^(1 - c - eta)
  double K() const;        // (ln X)^10
  double epsilon() const;  // (ln X)^-2
};

struct PrimeTable {
  std::uint64_t X = 0;
  std::vector<std::uint64_t> primes;  // ascending, all primes in (X, 2X]
  std::vector<double> logs;
};

inline constexpr std::uint64_t kMinSieveX = 10;
inline constexpr std::uint64_t kMaxSieveX = 100000000;

// Throws DomainError when X is outside [10, 1e8].
PrimeTable sieve_range(std::uint64_t X);

// sum_n w_n e(n^c x) over a fixed node set.
class ExpSum {
 public:
  ExpSum() = default;
  ExpSum(std::span<const std::uint64_t> nodes, std::span<const double> weights, double c);

  std::complex<double> operator()(double x) const;
  double at_zero() const { return total_; }
  std::size_t size() const { return pow_.size(); }
  double c() const { return c_; }
  const std::vector<PowDD>& powers() const { return pow_; }
  const std::vector<double>& weights() const { return w_; }

 private:
  std::vector<PowDD> pow_;
  std::vector<double> w_;
  double c_ = 0.0;
  double total_ = 0.0;
};

// Throw DomainError when t.X != g.X.
ExpSum make_S(const GlobalParams& g, const PrimeTable& t);
ExpSum make_U(const GlobalParams& g, const PrimeTable& t);  // adds prime powers p^k in (X, 2X], weight ln p
ExpSum make_T(const GlobalParams& g);

std::complex<double> eval_S(double x, const GlobalParams& g, const PrimeTable& t);
std::complex<double> eval_U(double x, const GlobalParams& g, const PrimeTable& t);
std::complex<double> eval_T(double x, const GlobalParams& g);

// I(x) = int_X^{2X} e(t^c x) dt. Small |x| X^c: adaptive quadrature in t.
// Otherwise: the integration-by-parts expansion at both endpoints in u = t^c,
// summed until the terms fall below double precision.
class OscIntegral {
 public:
  explicit OscIntegral(const GlobalParams& g);
  std::complex<double> operator()(double x) const;
  double decay_bound(double x) const;  // 2 / (pi c |x| X^(c-1))

 private:
  std::complex<double> quadrature(double ax) const;
  std::complex<double> expansion(double ax) const;

  double c_, X_, alpha_;
  PowDD A_, B_;  // X^c, (2X)^c
};

// Throws NumericError if the decay bound fails or quadrature does not converge.
std::complex<double> eval_I(double x, const GlobalParams& g);

enum class SumKind { S, U, T, I };
SumKind parse_sum_kind(const std::string& s);
std::string to_string(SumKind k);

struct EvalRow {
  std::uint64_t X = 0;
  double c = 0.0;
  double x = 0.0;
  std::complex<double> value;
  double bound = 0.0;  // value at 0 for S, U, T; min(X, decay bound) for I
  double ratio() const { return std::abs(value) / bound; }
};

std::vector<EvalRow> evaluate(SumKind kind, const GlobalParams& g, std::span<const double> xs);

struct MajorArcRow {
  std::uint64_t X = 0;
  double tau = 0.0;
  double zero_ratio = 0.0;  // |S(0) - X| / X
  double max_ratio = 0.0;   // max |S(x) - I(x)| / X over the grid
  double argmax_x = 0.0;
  std::size_t grid = 0;
};

// Grid x_k = tau k / (grid - 1), k = 0..grid-1 (negative x mirror by conjugation).
// eta must be zero.
std::vector<MajorArcRow> major_arc_report(double c, std::span<const std::uint64_t> ladder, const Rational& eta = {},
                                          std::size_t grid = 100);

// int_{-tau}^{tau} |S|^2 in closed form: sum_{p,q} w_p w_q sin(2 pi tau d)/(pi d), d = p^c - q^c.
double major_moment(const ExpSum& s, double tau);
// The same integral by the composite trapezoid rule with `intervals` panels on [0, tau].
double major_moment_trapezoid(const ExpSum& s, double tau, std::size_t intervals);

struct MinorMoment {
  double value = 0.0;
  double ci95 = 0.0;
  std::size_t samples = 0;
};

// int_{tau < |x| < K} |S(x)^2 Phi(x)| dx by importance sampling from the
// piecewise envelope of |Phi|. Deterministic given seed (independent of threads).
MinorMoment minor_moment(const ExpSum& s, const KernelParams& kp, double tau, double K, std::size_t samples,
                         std::uint64_t seed);

struct MomentRow {
  std::uint64_t X = 0;
  double tau = 0.0;
  double K = 0.0;
  double major = 0.0;
  double major_ratio = 0.0;  // major / (X^(2-c) (ln X)^3)
  double minor = 0.0;
  double minor_ci95 = 0.0;
  double minor_ratio = 0.0;  // minor / X
  std::size_t samples = 0;
};

std::vector<MomentRow> moment_report(double c, std::span<const std::uint64_t> ladder, std::uint64_t seed,
                                     std::size_t samples = 2000);

inline constexpr double kMinorExponent = 2515.0 / 2667.0;

struct MinorGridRow {
  std::uint64_t X = 0;
  std::size_t points = 0;
  double max_abs = 0.0;
  double argmax_x = 0.0;
  double ratio = 0.0;  // max_abs / X^(2515/2667)
};

// Half log-uniform random points in (tau, K), half rationals a/q with q <= 12.
std::vector<double> minor_grid(const GlobalParams& g, std::size_t points, std::uint64_t seed);
MinorGridRow minor_grid_report(const GlobalParams& g, const PrimeTable& t, std::size_t points, std::uint64_t seed);

}  // namespace ps4
