#include "ps4/sieve.hpp"

#include <algorithm>
#include <cmath>

namespace ps4 {

namespace {

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

constexpr std::uint64_t kSegment = 1u << 18;

}  // namespace

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  if (limit < 2) return out;
  std::vector<char> composite(limit + 1, 0);
  for (std::uint64_t i = 2; i * i <= limit; ++i)
    if (!composite[i])
      for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
  for (std::uint64_t i = 2; i <= limit; ++i)
    if (!composite[i]) out.push_back(i);
  return out;
}

std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> out;
  if (hi <= lo) return out;
  const auto base = primes_up_to(isqrt(hi));
  std::vector<char> composite(kSegment);
  for (std::uint64_t start = lo + 1; start <= hi; start += kSegment) {
    const std::uint64_t end = std::min(hi, start + kSegment - 1);  // inclusive
    std::fill(composite.begin(), composite.end(), 0);
    for (std::uint64_t p : base) {
      if (p * p > end) break;
      std::uint64_t first = std::max(p * p, (start + p - 1) / p * p);
      for (std::uint64_t j = first; j <= end; j += p) composite[j - start] = 1;
    }
    for (std::uint64_t n = std::max<std::uint64_t>(start, 2); n <= end; ++n)
      if (!composite[n - start]) out.push_back(n);
  }
  return out;
}

}  // namespace ps4
