#include "ps4/sums.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ps4/error.hpp"
#include "ps4/parallel.hpp"
#include "ps4/quadrature.hpp"
#include "ps4/sieve.hpp"

namespace ps4 {

namespace {

constexpr double kPi = std::numbers::pi;
// Switch to the endpoint expansion once 2 pi |x| X^c reaches this; the smallest
// expansion term is then about e^-40.
constexpr double kExpansionOnset = 40.0;

void check_table(const GlobalParams& g, const PrimeTable& t) {
  if (t.X != g.X)
    throw DomainError("prime table is for X = " + std::to_string(t.X) + " but parameters have X = " +
                      std::to_string(g.X));
}

double to_dbl(const PowDD& v) { return v.hi + v.lo; }

}  // namespace

GlobalParams GlobalParams::make(double c, std::uint64_t X, Rational eta) {
  if (!(c > 1.0 && c < 2.0)) throw DomainError("c must satisfy 1 < c < 2, got " + std::to_string(c));
  if (X < 10) throw DomainError("X must be at least 10, got " + std::to_string(X));
  if (eta.sign() < 0) throw DomainError("eta must be nonnegative");
  return {c, X, std::move(eta)};
}

double GlobalParams::tau() const {
  return std::pow(static_cast<double>(X), 1.0 - c - eta.to_double());
}
double GlobalParams::K() const { return std::pow(std::log(static_cast<double>(X)), 10.0); }
double GlobalParams::epsilon() const { return std::pow(std::log(static_cast<double>(X)), -2.0); }

PrimeTable sieve_range(std::uint64_t X) {
  if (X < kMinSieveX || X > kMaxSieveX)
    throw DomainError("sieve size out of range: X = " + std::to_string(X) + " (need 10 <= X <= 1e8)");
  PrimeTable t;
  t.X = X;
  t.primes = primes_in(X, 2 * X);
  t.logs.reserve(t.primes.size());
  for (auto p : t.primes) t.logs.push_back(std::log(static_cast<double>(p)));
  return t;
}

ExpSum::ExpSum(std::span<const std::uint64_t> nodes, std::span<const double> weights, double c) : c_(c) {
  if (nodes.size() != weights.size()) throw DomainError("node and weight counts differ");
  pow_.reserve(nodes.size());
  long double total = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    pow_.push_back(pow_dd(static_cast<double>(nodes[i]), c));
    total += weights[i];
  }
  w_.assign(weights.begin(), weights.end());
  total_ = static_cast<double>(total);
}

std::complex<double> ExpSum::operator()(double x) const {
  if (x == 0.0) return {total_, 0.0};
  long double re = 0, im = 0;
  for (std::size_t i = 0; i < pow_.size(); ++i) {
    auto z = unit(phase_frac(pow_[i], x));
    re += w_[i] * z.real();
    im += w_[i] * z.imag();
  }
  return {static_cast<double>(re), static_cast<double>(im)};
}

ExpSum make_S(const GlobalParams& g, const PrimeTable& t) {
  check_table(g, t);
  return ExpSum(t.primes, t.logs, g.c);
}

ExpSum make_U(const GlobalParams& g, const PrimeTable& t) {
  check_table(g, t);
  std::vector<std::uint64_t> nodes = t.primes;
  std::vector<double> w = t.logs;
  const std::uint64_t lo = g.X, hi = 2 * g.X;
  for (auto p : primes_up_to(static_cast<std::uint64_t>(std::sqrt(static_cast<double>(hi))) + 1)) {
    std::uint64_t q = p * p;
    while (q <= hi) {
      if (q > lo) {
        nodes.push_back(q);
        w.push_back(std::log(static_cast<double>(p)));
      }
      if (q > hi / p) break;
      q *= p;
    }
  }
  return ExpSum(nodes, w, g.c);
}

ExpSum make_T(const GlobalParams& g) {
  std::vector<std::uint64_t> nodes(g.X);
  for (std::uint64_t i = 0; i < g.X; ++i) nodes[i] = g.X + 1 + i;
  std::vector<double> w(g.X, 1.0);
  return ExpSum(nodes, w, g.c);
}

std::complex<double> eval_S(double x, const GlobalParams& g, const PrimeTable& t) { return make_S(g, t)(x); }
std::complex<double> eval_U(double x, const GlobalParams& g, const PrimeTable& t) { return make_U(g, t)(x); }
std::complex<double> eval_T(double x, const GlobalParams& g) { return make_T(g)(x); }

OscIntegral::OscIntegral(const GlobalParams& g)
    : c_(g.c),
      X_(static_cast<double>(g.X)),
      alpha_(1.0 / g.c - 1.0),
      A_(pow_dd(static_cast<double>(g.X), g.c)),
      B_(pow_dd(2.0 * static_cast<double>(g.X), g.c)) {}

double OscIntegral::decay_bound(double x) const {
  return 2.0 / (kPi * c_ * std::abs(x) * std::pow(X_, c_ - 1.0));
}

std::complex<double> OscIntegral::quadrature(double ax) const {
  auto f = [&](double t) { return unit(std::exp(c_ * std::log(t)) * ax); };
  const double turns = ax * (to_dbl(B_) - to_dbl(A_));
  const auto pieces = static_cast<std::size_t>(std::ceil(turns)) + 1;
  std::vector<double> breaks;
  for (std::size_t i = 1; i < pieces; ++i) breaks.push_back(X_ + X_ * static_cast<double>(i) / pieces);
  quad::Tolerance tol;
  tol.rel = 1e-12;
  tol.abs = 1e-13 * X_;
  return quad::integrate_or_throw<std::complex<double>>(f, X_, 2.0 * X_, tol, breaks);
}

std::complex<double> OscIntegral::expansion(double ax) const {
  // int_A^B g(u) e(u x) du with g(u) = u^alpha / c:
  //   sum_k (-1)^k g^(k)(u) e(u x) / (2 pi i x)^(k+1) evaluated between A and B.
  const std::complex<double> z(0.0, -1.0 / (2.0 * kPi * ax));
  auto endpoint = [&](const PowDD& u) {
    const double uu = to_dbl(u);
    std::complex<double> term = std::pow(uu, alpha_) * z;
    std::complex<double> sum = term;
    double last = std::abs(term);
    for (int k = 0; k < 400; ++k) {
      term *= -(alpha_ - k) / uu * z;
      const double m = std::abs(term);
      if (m > last) break;  // asymptotic: stop at the smallest term
      sum += term;
      if (m <= 1e-18 * std::abs(sum)) break;
      last = m;
    }
    return sum * unit(phase_frac(u, ax));
  };
  return (endpoint(B_) - endpoint(A_)) / c_;
}

std::complex<double> OscIntegral::operator()(double x) const {
  if (x == 0.0) return {X_, 0.0};
  const double ax = std::abs(x);
  auto v = 2.0 * kPi * ax * to_dbl(A_) < kExpansionOnset ? quadrature(ax) : expansion(ax);
  if (std::abs(v) > decay_bound(x) * (1.0 + 1e-9))
    throw NumericError("decay bound violated for I at x = " + std::to_string(x));
  return x < 0 ? std::conj(v) : v;
}

std::complex<double> eval_I(double x, const GlobalParams& g) { return OscIntegral(g)(x); }

SumKind parse_sum_kind(const std::string& s) {
  if (s == "S") return SumKind::S;
  if (s == "U") return SumKind::U;
  if (s == "T") return SumKind::T;
  if (s == "I") return SumKind::I;
  throw ParseError("unknown sum kind '" + s + "' (expected S, U, T or I)", 0);
}

std::string to_string(SumKind k) {
  switch (k) {
    case SumKind::S: return "S";
    case SumKind::U: return "U";
    case SumKind::T: return "T";
    case SumKind::I: return "I";
  }
  return "?";
}

std::vector<EvalRow> evaluate(SumKind kind, const GlobalParams& g, std::span<const double> xs) {
  std::vector<EvalRow> rows(xs.size());
  ExpSum sum;
  OscIntegral integral(g);
  if (kind == SumKind::T) {
    sum = make_T(g);
  } else if (kind != SumKind::I) {
    auto t = sieve_range(g.X);
    sum = kind == SumKind::S ? make_S(g, t) : make_U(g, t);
  }
  parallel_ranges(xs.size(), [&](std::size_t lo, std::size_t hi, std::size_t) {
    for (std::size_t i = lo; i < hi; ++i) {
      EvalRow& r = rows[i];
      r.X = g.X;
      r.c = g.c;
      r.x = xs[i];
      if (kind == SumKind::I) {
        r.value = integral(xs[i]);
        r.bound = xs[i] == 0.0 ? static_cast<double>(g.X)
                               : std::min(static_cast<double>(g.X), integral.decay_bound(xs[i]));
      } else {
        r.value = sum(xs[i]);
        r.bound = sum.at_zero();
      }
    }
  });
  return rows;
}

std::vector<MajorArcRow> major_arc_report(double c, std::span<const std::uint64_t> ladder, const Rational& eta,
                                          std::size_t grid) {
  if (!eta.is_zero()) throw DomainError("major_arc_report requires eta = 0");
  if (grid < 2) throw DomainError("major arc grid needs at least 2 points");
  std::vector<MajorArcRow> out;
  for (auto X : ladder) {
    auto g = GlobalParams::make(c, X, eta);
    auto t = sieve_range(X);
    auto S = make_S(g, t);
    OscIntegral I(g);
    MajorArcRow row;
    row.X = X;
    row.tau = g.tau();
    row.grid = grid;
    const double Xd = static_cast<double>(X);
    row.zero_ratio = std::abs(S.at_zero() - Xd) / Xd;
    std::vector<double> ratio(grid);
    parallel_ranges(grid, [&](std::size_t lo, std::size_t hi, std::size_t) {
      for (std::size_t k = lo; k < hi; ++k) {
        double x = row.tau * static_cast<double>(k) / static_cast<double>(grid - 1);
        ratio[k] = std::abs(S(x) - I(x)) / Xd;
      }
    });
    for (std::size_t k = 0; k < grid; ++k) {
      if (ratio[k] > row.max_ratio) {
        row.max_ratio = ratio[k];
        row.argmax_x = row.tau * static_cast<double>(k) / static_cast<double>(grid - 1);
      }
    }
    out.push_back(row);
  }
  return out;
}

double major_moment(const ExpSum& s, double tau) {
  const auto& pw = s.powers();
  const auto& w = s.weights();
  const std::size_t n = pw.size();
  long double diag = 0;
  for (double v : w) diag += static_cast<long double>(v) * v;
  std::vector<long double> partial(thread_count() + 1, 0.0L);
  parallel_ranges(n, [&](std::size_t lo, std::size_t hi, std::size_t shard) {
    long double acc = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = (pw[j].hi - pw[i].hi) + (pw[j].lo - pw[i].lo);
        acc += w[i] * w[j] * (std::sin(2.0 * kPi * tau * d) / (kPi * d));
      }
    }
    partial[shard] = acc;
  });
  long double off = 0;
  for (auto v : partial) off += v;
  return static_cast<double>(2.0L * tau * diag + 2.0L * off);
}

double major_moment_trapezoid(const ExpSum& s, double tau, std::size_t intervals) {
  if (intervals < 1) throw DomainError("trapezoid needs at least one interval");
  std::vector<double> f(intervals + 1);
  parallel_ranges(intervals + 1, [&](std::size_t lo, std::size_t hi, std::size_t) {
    for (std::size_t k = lo; k < hi; ++k) f[k] = std::norm(s(tau * static_cast<double>(k) / intervals));
  });
  long double acc = 0.5L * (f.front() + f.back());
  for (std::size_t k = 1; k < intervals; ++k) acc += f[k];
  return static_cast<double>(2.0L * acc * tau / intervals);
}

namespace {

// Piecewise envelope of |Phi| on (lo, hi): 2a, then 1/(pi x), then (1/(pi x)) (x2/x)^r.
struct Envelope {
  double a, x1, x2;
  int r;
  double lo, hi;
  double mass[3];
  double edges[4];

  Envelope(const KernelParams& kp, double lo_, double hi_) : a(kp.a), r(kp.r), lo(lo_), hi(hi_) {
    x1 = 1.0 / (2.0 * kPi * kp.a);
    x2 = kp.r / (2.0 * kPi * kp.b);
    edges[0] = lo;
    edges[1] = std::clamp(x1, lo, hi);
    edges[2] = std::clamp(x2, lo, hi);
    edges[3] = hi;
    mass[0] = 2.0 * a * (edges[1] - edges[0]);
    mass[1] = std::log(edges[2] / edges[1]) / kPi;
    mass[2] = (std::pow(x2 / edges[2], r) - std::pow(x2 / edges[3], r)) / (kPi * r);
  }
  double total() const { return mass[0] + mass[1] + mass[2]; }
  double value(double x) const {
    if (x < x1) return 2.0 * a;
    if (x < x2) return 1.0 / (kPi * x);
    return std::pow(x2 / x, r) / (kPi * x);
  }
  double sample(double u_piece, double u) const {
    double pick = u_piece * total();
    if (pick < mass[0] || (mass[1] == 0 && mass[2] == 0)) return edges[0] + u * (edges[1] - edges[0]);
    if (pick < mass[0] + mass[1] || mass[2] == 0) return edges[1] * std::pow(edges[2] / edges[1], u);
    double top = std::pow(x2 / edges[2], r), bot = std::pow(x2 / edges[3], r);
    return x2 / std::pow(top - u * (top - bot), 1.0 / r);
  }
};

constexpr std::size_t kBlock = 256;

}  // namespace

MinorMoment minor_moment(const ExpSum& s, const KernelParams& kp, double tau, double K, std::size_t samples,
                         std::uint64_t seed) {
  if (!(K > tau)) throw DomainError("minor arc is empty (K <= tau)");
  if (samples < 2) throw DomainError("minor moment needs at least 2 samples");
  Envelope env(kp, tau, K);
  const double Z = env.total();
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<long double> sum(blocks, 0.0L), sq(blocks, 0.0L);
  parallel_ranges(blocks, [&](std::size_t lo, std::size_t hi, std::size_t) {
    for (std::size_t b = lo; b < hi; ++b) {
      std::seed_seq sseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(b)};
      std::mt19937_64 rng(sseq);
      std::uniform_real_distribution<double> U(0.0, 1.0);
      const std::size_t n = std::min(kBlock, samples - b * kBlock);
      for (std::size_t i = 0; i < n; ++i) {
        double up = U(rng), u = U(rng);
        double x = env.sample(up, u);
        double val = std::norm(s(x)) * std::abs(phi_hat(x, kp)) * Z / env.value(x);
        sum[b] += val;
        sq[b] += static_cast<long double>(val) * val;
      }
    }
  });
  long double m = 0, m2 = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    m += sum[b];
    m2 += sq[b];
  }
  const auto n = static_cast<long double>(samples);
  const long double mean = m / n;
  const long double var = std::max(0.0L, (m2 / n - mean * mean) * n / (n - 1));
  // Both signs of x contribute equally.
  return {static_cast<double>(2 * mean), static_cast<double>(2 * 1.96L * std::sqrt(var / n)), samples};
}

std::vector<MomentRow> moment_report(double c, std::span<const std::uint64_t> ladder, std::uint64_t seed,
                                     std::size_t samples) {
  std::vector<MomentRow> out;
  for (auto X : ladder) {
    auto g = GlobalParams::make(c, X);
    auto t = sieve_range(X);
    auto S = make_S(g, t);
    const double Xd = static_cast<double>(X);
    MomentRow row;
    row.X = X;
    row.tau = g.tau();
    row.K = g.K();
    row.major = major_moment(S, row.tau);
    row.major_ratio = row.major / (std::pow(Xd, 2.0 - c) * std::pow(std::log(Xd), 3.0));
    auto mm = minor_moment(S, KernelParams::for_window(g.epsilon(), Xd), row.tau, row.K, samples, seed);
    row.minor = mm.value;
    row.minor_ci95 = mm.ci95;
    row.minor_ratio = mm.value / Xd;
    row.samples = mm.samples;
    out.push_back(row);
  }
  return out;
}

std::vector<double> minor_grid(const GlobalParams& g, std::size_t points, std::uint64_t seed) {
  const double tau = g.tau(), K = g.K();
  if (!(K > tau)) throw DomainError("minor arc is empty (K <= tau)");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto loguniform = [&] { return tau * std::pow(K / tau, U(rng)); };
  std::vector<double> xs;
  xs.reserve(points);
  const std::size_t structured = points / 2;
  for (std::size_t i = 0; i < structured; ++i) {
    const double q = static_cast<double>(1 + i % 12);
    double a = std::max(1.0, std::round(loguniform() * q));
    if (a / q <= tau) a = std::floor(tau * q) + 1.0;
    if (a / q >= K) a = std::ceil(K * q) - 1.0;
    xs.push_back(a / q);
  }
  while (xs.size() < points) xs.push_back(loguniform());
  return xs;
}

MinorGridRow minor_grid_report(const GlobalParams& g, const PrimeTable& t, std::size_t points, std::uint64_t seed) {
  auto S = make_S(g, t);
  auto xs = minor_grid(g, points, seed);
  std::vector<double> mag(xs.size());
  parallel_ranges(xs.size(), [&](std::size_t lo, std::size_t hi, std::size_t) {
    for (std::size_t i = lo; i < hi; ++i) mag[i] = std::abs(S(xs[i]));
  });
  MinorGridRow row;
  row.X = g.X;
  row.points = xs.size();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (mag[i] > row.max_abs) {
      row.max_abs = mag[i];
      row.argmax_x = xs[i];
    }
  }
  row.ratio = row.max_abs / std::pow(static_cast<double>(g.X), kMinorExponent);
  return row;
}

}  // namespace ps4
