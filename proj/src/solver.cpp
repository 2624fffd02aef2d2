#include "ps4/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "ps4/error.hpp"
#include "ps4/kernel.hpp"
#include "ps4/parallel.hpp"
#include "ps4/phase.hpp"
#include "ps4/quadrature.hpp"
#include "ps4/sieve.hpp"
#include "ps4/sums.hpp"

namespace ps4 {

std::string Instance::str() const {
  std::ostringstream os;
  os.precision(17);
  os << "c=" << c << " N=" << N << " eps=" << eps << (eps_overridden ? " (override)" : " (default)") << " X=" << X;
  if (outside_theorem) os << " [c >= 1193/889]";
  return os.str();
}

std::uint64_t derive_X(double c, double N) {
  return static_cast<std::uint64_t>(std::floor(0.5 * std::pow(2.0 * N / 5.0, 1.0 / c)));
}

Instance make_instance(double c, double N, std::optional<double> eps_override) {
  if (!(c > 1.0 && c < 2.0)) throw DomainError("c must satisfy 1 < c < 2, got " + std::to_string(c));
  if (!(N > 0.0) || !std::isfinite(N)) throw DomainError("N must be positive and finite");
  Instance in;
  in.c = c;
  in.N = N;
  in.X = derive_X(c, N);
  if (in.X < 10)
    throw DomainError("N = " + std::to_string(N) + " is too small: X = " + std::to_string(in.X) + " < 10");
  if (in.X > kMaxSieveX) throw DomainError("N = " + std::to_string(N) + " is too large: X exceeds 1e8");
  if (eps_override) {
    if (!(*eps_override > 0.0) || !std::isfinite(*eps_override)) throw DomainError("eps must be positive");
    in.eps = *eps_override;
    in.eps_overridden = true;
  } else {
    in.eps = std::pow(std::log(static_cast<double>(in.X)), -2.0);
  }
  in.outside_theorem = static_cast<long double>(c) * 889.0L >= 1193.0L;
  return in;
}

long double quad_sum(long double v1, long double v2, long double v3, long double v4) {
  return (v1 + v2) + (v3 + v4);
}

double quad_weight(double l1, double l2, double l3, double l4) { return (l1 * l2) * (l3 * l4); }

void WeightSum::add(double w, std::uint64_t multiplicity) {
  // Exact when w is a multiple of 2^-64, i.e. for every w >= 2^-11 (weights
  // here exceed 30).
  if (!(w >= 0x1p-11 && w < 0x1p40)) throw NumericError("weight outside the exact accumulator range");
  auto scaled = static_cast<unsigned __int128>(std::ldexp(w, 64));
  acc_ += scaled * multiplicity;
}

WeightSum& WeightSum::operator+=(const WeightSum& o) {
  acc_ += o.acc_;
  return *this;
}

double WeightSum::value() const {
  const auto hi = static_cast<std::uint64_t>(acc_ >> 64);
  const auto lo = static_cast<std::uint64_t>(acc_);
  return static_cast<double>(static_cast<long double>(hi) + std::ldexp(static_cast<long double>(lo), -64));
}

namespace {

struct Entry {
  std::uint64_t key;
  std::uint32_t i, j;
};

struct Prepared {
  const Instance& inst;
  std::vector<std::uint64_t> primes;
  std::vector<long double> v;  // p^c
  std::vector<double> l;       // ln p
  std::vector<Entry> pairs;    // unordered i <= j, sorted by key
  int shift = 32;

  explicit Prepared(const Instance& in) : inst(in) {
    primes = primes_in(in.X, 2 * in.X);
    const auto P = static_cast<std::uint64_t>(primes.size());
    if (P * P > kPairCapacity) {
      const double bytes = static_cast<double>(P) * static_cast<double>(P + 1) / 2.0 * sizeof(Entry);
      std::ostringstream os;
      os << "instance too large: P = " << P << " primes gives P^2 = " << P * P << " > 2^31 pair entries (about "
         << bytes / 1e9 << " GB of pair table)";
      throw DomainError(os.str());
    }
    v.reserve(P);
    l.reserve(P);
    for (auto p : primes) {
      v.push_back(std::pow(static_cast<long double>(p), static_cast<long double>(in.c)));
      l.push_back(std::log(static_cast<double>(p)));
    }
    if (P == 0) return;
    const long double top = 2 * v.back();
    shift = std::min(32, 62 - static_cast<int>(std::ceil(std::log2(top + 1))));
    pairs.reserve(P * (P + 1) / 2);
    for (std::uint32_t i = 0; i < P; ++i)
      for (std::uint32_t j = i; j < P; ++j) pairs.push_back({key(v[i] + v[j]), i, j});
    std::sort(pairs.begin(), pairs.end(), [](const Entry& a, const Entry& b) {
      return a.key != b.key ? a.key < b.key : (a.i != b.i ? a.i < b.i : a.j < b.j);
    });
  }

  std::uint64_t key(long double s) const {
    if (s <= 0) return 0;
    return static_cast<std::uint64_t>(std::floor(std::ldexp(s, shift)));
  }

  // Candidate range of right pairs for a left pair sum sL; the caller applies the
  // exact rule to each candidate.
  std::pair<const Entry*, const Entry*> window(long double sL) const {
    const long double slack = 1e-9L + 1e-15L * std::abs(static_cast<long double>(inst.N));
    const long double lo = inst.N - sL - inst.eps - slack;
    const long double hi = inst.N - sL + inst.eps + slack;
    if (hi < 0 || pairs.empty()) return {nullptr, nullptr};
    const std::uint64_t klo = key(lo), khi = key(hi);
    auto first = std::lower_bound(pairs.begin(), pairs.end(), klo,
                                  [](const Entry& e, std::uint64_t k) { return e.key < k; });
    auto last = std::upper_bound(first, pairs.end(), khi, [](std::uint64_t k, const Entry& e) { return k < e.key; });
    return {pairs.data() + (first - pairs.begin()), pairs.data() + (last - pairs.begin())};
  }

  bool accept(long double sL, const Entry& e, long double* total = nullptr) const {
    const long double t = sL + (v[e.i] + v[e.j]);
    if (total) *total = t;
    return std::abs(t - static_cast<long double>(inst.N)) < static_cast<long double>(inst.eps);
  }
};

}  // namespace

std::vector<SolutionRecord> find_solutions(const Instance& inst, std::size_t limit) {
  Prepared prep(inst);
  const std::size_t P = prep.primes.size();
  std::vector<SolutionRecord> out;
  if (limit == 0 || P == 0) return out;
  // Blocks of p1 indices; each block runs in parallel and merges in index order.
  const std::size_t block = limit == kNoLimit ? P : std::max<std::size_t>(1, 4 * thread_count());
  for (std::size_t start = 0; start < P && out.size() < limit; start += block) {
    const std::size_t end = std::min(P, start + block);
    std::vector<std::vector<SolutionRecord>> found(end - start);
    parallel_ranges(end - start, [&](std::size_t lo, std::size_t hi, std::size_t) {
      for (std::size_t a = lo; a < hi; ++a) {
        const std::size_t i = start + a;
        auto& bucket = found[a];
        for (std::size_t j = 0; j < P; ++j) {
          const long double sL = prep.v[i] + prep.v[j];
          const std::size_t mark = bucket.size();
          auto [first, last] = prep.window(sL);
          for (auto e = first; e != last; ++e) {
            long double total;
            if (!prep.accept(sL, *e, &total)) continue;
            const double delta = static_cast<double>(total - static_cast<long double>(inst.N));
            bucket.push_back({prep.primes[i], prep.primes[j], prep.primes[e->i], prep.primes[e->j], delta});
            if (e->i != e->j)
              bucket.push_back({prep.primes[i], prep.primes[j], prep.primes[e->j], prep.primes[e->i], delta});
          }
          std::sort(bucket.begin() + static_cast<std::ptrdiff_t>(mark), bucket.end());
          if (limit != kNoLimit && bucket.size() >= limit) break;
        }
      }
    });
    for (auto& b : found) {
      for (auto& r : b) {
        if (out.size() >= limit) break;
        out.push_back(r);
      }
    }
  }
  // Self-check: re-derive every record from its primes.
  auto pw = [&](std::uint64_t p) { return std::pow(static_cast<long double>(p), static_cast<long double>(inst.c)); };
  for (const auto& r : out) {
    for (auto p : {r.p1, r.p2, r.p3, r.p4})
      if (p <= inst.X || p > 2 * inst.X) throw NumericError("solution prime outside (X, 2X]");
    const long double t = quad_sum(pw(r.p1), pw(r.p2), pw(r.p3), pw(r.p4));
    if (!(std::abs(t - static_cast<long double>(inst.N)) < static_cast<long double>(inst.eps)))
      throw NumericError("solution outside the window");
  }
  return out;
}

WeightedCount count_weighted(const Instance& inst) {
  Prepared prep(inst);
  const std::size_t P = prep.primes.size();
  WeightedCount res;
  res.P = P;
  const std::size_t shards = std::max<unsigned>(1, thread_count());
  std::vector<WeightSum> acc(shards);
  std::vector<std::uint64_t> raw(shards, 0);
  parallel_ranges(P, [&](std::size_t lo, std::size_t hi, std::size_t shard) {
    WeightSum w;
    std::uint64_t n = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = i; j < P; ++j) {
        const long double sL = prep.v[i] + prep.v[j];
        const std::uint64_t ordL = i == j ? 1 : 2;
        const double wL = prep.l[i] * prep.l[j];
        auto [first, last] = prep.window(sL);
        for (auto e = first; e != last; ++e) {
          if (!prep.accept(sL, *e)) continue;
          const std::uint64_t mult = ordL * (e->i == e->j ? 1 : 2);
          n += mult;
          w.add(wL * (prep.l[e->i] * prep.l[e->j]), mult);
        }
      }
    }
    acc[shard] = w;
    raw[shard] = n;
  });
  for (std::size_t s = 0; s < shards; ++s) {
    res.exact += acc[s];
    res.raw += raw[s];
  }
  res.B4 = res.exact.value();
  return res;
}

Volume predicted_volume(const Instance& inst, std::size_t samples, std::uint64_t seed) {
  if (samples < 10000) throw DomainError("predicted_volume needs at least 1e4 samples");
  const double X = static_cast<double>(inst.X), c = inst.c;
  const double lo_c = std::pow(X, c), hi_c = std::pow(2 * X, c);
  if (inst.N + inst.eps <= 4 * lo_c || inst.N - inst.eps >= 4 * hi_c) return {0.0, 0.0};
  constexpr std::size_t kBlock = 1024;
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<long double> sum(blocks, 0.0L), sq(blocks, 0.0L);
  parallel_ranges(blocks, [&](std::size_t b0, std::size_t b1, std::size_t) {
    for (std::size_t b = b0; b < b1; ++b) {
      std::seed_seq sseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(b)};
      std::mt19937_64 rng(sseq);
      std::uniform_real_distribution<double> U(X, 2 * X);
      const std::size_t n = std::min(kBlock, samples - b * kBlock);
      for (std::size_t k = 0; k < n; ++k) {
        const double rest = inst.N - (std::pow(U(rng), c) + std::pow(U(rng), c) + std::pow(U(rng), c));
        const double a = rest - inst.eps, z = rest + inst.eps;
        double len = 0.0;
        if (z > lo_c && a < hi_c) {
          const double t_lo = a <= lo_c ? X : std::pow(a, 1.0 / c);
          const double t_hi = z >= hi_c ? 2 * X : std::pow(z, 1.0 / c);
          len = std::max(0.0, t_hi - t_lo);
        }
        sum[b] += len;
        sq[b] += static_cast<long double>(len) * len;
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
  const long double cube = static_cast<long double>(X) * X * X;
  return {static_cast<double>(cube * mean), static_cast<double>(cube * 1.96L * std::sqrt(var / n))};
}

MainTerm main_term_integral(const Instance& inst, double cutoff_factor) {
  if (!(cutoff_factor > 0)) throw DomainError("cutoff factor must be positive");
  auto g = GlobalParams::make(inst.c, inst.X);
  const double Xd = static_cast<double>(inst.X);
  auto kp = KernelParams::for_window(inst.eps, Xd);
  OscIntegral I(g);
  const double T = cutoff_factor * g.tau();
  auto f = [&](double x) {
    const auto v = I(x);
    const auto v2 = v * v;
    const double nx = inst.N * x;
    return v2 * v2 * phi_hat(x, kp) * unit(-(nx - std::nearbyint(nx)));
  };
  // Fastest oscillation of I^4 e(-Nx): frequency max(4 (2X)^c - N, N - 4 X^c).
  const double A = std::pow(Xd, inst.c), B = std::pow(2 * Xd, inst.c);
  const double freq = std::max({4 * B - inst.N, inst.N - 4 * A, 1.0 / T});
  const auto panels = static_cast<std::size_t>(std::ceil(T * freq)) + 1;
  std::vector<double> up, down;
  up.reserve(panels);
  down.reserve(panels);
  for (std::size_t k = 1; k < panels; ++k) up.push_back(T * static_cast<double>(k) / panels);
  for (auto it = up.rbegin(); it != up.rend(); ++it) down.push_back(-*it);
  quad::Tolerance tol;
  tol.rel = 1e-9;
  tol.max_panels = 4 * panels + 200000;
  const auto right = quad::integrate_or_throw<std::complex<double>>(f, 0.0, T, tol, up);
  const auto left = quad::integrate_or_throw<std::complex<double>>(f, -T, 0.0, tol, down);
  const auto total = left + right;
  MainTerm out{total.real(), total.imag(), T};
  if (!(std::abs(out.imag) < 1e-6 * std::abs(out.value)))
    throw NumericError("main term integral has a non-negligible imaginary part");
  return out;
}

std::vector<ScanRow> scan(double c, std::span<const double> Ns, const ScanOptions& opt) {
  std::vector<ScanRow> rows;
  rows.reserve(Ns.size());
  for (double N : Ns) {
    std::optional<double> eps = opt.eps;
    if (opt.log_window) eps = 1.0 / std::log(N);
    auto inst = make_instance(c, N, eps);
    auto cnt = count_weighted(inst);
    auto vol = predicted_volume(inst, opt.mc_samples, opt.seed);
    ScanRow r;
    r.N = N;
    r.X = inst.X;
    r.P = cnt.P;
    r.eps = inst.eps;
    r.raw = cnt.raw;
    r.B4 = cnt.B4;
    r.V = vol.V;
    r.V_ci95 = vol.ci95;
    r.normalized = cnt.B4 / (inst.eps * std::pow(static_cast<double>(inst.X), 4.0 - c));
    r.solvable = cnt.raw > 0;
    rows.push_back(r);
  }
  return rows;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0 && hi >= lo) || n == 0) throw DomainError("log grid needs 0 < lo <= hi and n >= 1");
  std::vector<double> out;
  out.reserve(n);
  if (n == 1) return {lo};
  for (std::size_t k = 0; k < n; ++k) {
    if (k == n - 1) {
      out.push_back(hi);
    } else {
      out.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(n - 1)));
    }
  }
  return out;
}

}  // namespace ps4
