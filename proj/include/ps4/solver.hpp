#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ps4 {

struct Instance {
  double c = 1.2;
  double N = 0.0;
  double eps = 0.0;
  std::uint64_t X = 0;
  bool eps_overridden = false;
  bool outside_theorem = false;  // c >= 1193/889

  std::string str() const;
};

// floor((1/2) (2N/5)^(1/c)) with no range checks.
std::uint64_t derive_X(double c, double N);

// Throws DomainError unless 1 < c < 2, eps > 0 and the derived X >= 10.
Instance make_instance(double c, double N, std::optional<double> eps_override = std::nullopt);

struct SolutionRecord {
  std::uint64_t p1 = 0, p2 = 0, p3 = 0, p4 = 0;
  double delta = 0.0;  // p1^c + p2^c + p3^c + p4^c - N

  auto operator<=>(const SolutionRecord& o) const = default;
};

inline constexpr std::uint64_t kPairCapacity = std::uint64_t{1} << 31;
inline constexpr std::size_t kNoLimit = std::numeric_limits<std::size_t>::max();

// The acceptance rule shared by every counting path: with v = p^c in long
// double, |((v1 + v2) + (v3 + v4)) - N| < eps.
long double quad_sum(long double v1, long double v2, long double v3, long double v4);

// Per-quadruple weight (ln p1 ln p2)(ln p3 ln p4), rounded to double.
double quad_weight(double l1, double l2, double l3, double l4);

// Exact accumulator for quad weights: each term is added as a 2^-64 fixed-point integer.
class WeightSum {
 public:
  void add(double w, std::uint64_t multiplicity = 1);
  WeightSum& operator+=(const WeightSum& o);
  double value() const;
  unsigned __int128 fixed() const { return acc_; }  // the sum times 2^64
  bool operator==(const WeightSum& o) const { return acc_ == o.acc_; }

 private:
  unsigned __int128 acc_ = 0;
};

// Ordered quadruples in lexicographic (p1, p2, p3, p4) order, at most `limit`.
// Throws DomainError (with a memory estimate) when P^2 > 2^31.
std::vector<SolutionRecord> find_solutions(const Instance& inst, std::size_t limit = kNoLimit);

struct WeightedCount {
  std::size_t P = 0;  // primes in (X, 2X]
  double B4 = 0.0;
  std::uint64_t raw = 0;
  WeightSum exact;
};

WeightedCount count_weighted(const Instance& inst);

struct Volume {
  double V = 0.0;
  double ci95 = 0.0;
};

// Monte Carlo volume of {t in (X, 2X]^4 : |sum t_i^c - N| <= eps}: sample
// t1..t3, integrate t4 exactly. Throws DomainError when samples < 1e4.
Volume predicted_volume(const Instance& inst, std::size_t samples, std::uint64_t seed);

struct MainTerm {
  double value = 0.0;  // real part
  double imag = 0.0;
  double cutoff = 0.0;  // integration range is |x| <= cutoff
};

// int_{|x| <= factor tau} I(x)^4 Phi(x) e(-N x) dx with Phi for a = 0.9 eps,
// b = 0.1 eps, r = floor(ln X). Throws NumericError on quadrature failure or
// when |imag| >= 1e-6 |value|.
MainTerm main_term_integral(const Instance& inst, double cutoff_factor = 1.0);

struct ScanOptions {
  std::optional<double> eps;  // fixed window
  bool log_window = false;    // eps = 1 / ln N
  std::size_t mc_samples = 100000;
  std::uint64_t seed = 0;
};

struct ScanRow {
  double N = 0.0;
  std::uint64_t X = 0;
  std::size_t P = 0;
  double eps = 0.0;
  std::uint64_t raw = 0;
  double B4 = 0.0;
  double V = 0.0;
  double V_ci95 = 0.0;
  double normalized = 0.0;  // B4 / (eps X^(4-c))
  bool solvable = false;
};

std::vector<ScanRow> scan(double c, std::span<const double> Ns, const ScanOptions& opt);

// n points log-spaced over [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

}  // namespace ps4
