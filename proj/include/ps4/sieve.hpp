#pragma once

#include <cstdint>
#include <vector>

namespace ps4 {

// All primes <= limit.
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);

// Primes in the half-open interval (lo, hi], by a segmented sieve of Eratosthenes.
std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi);

}  // namespace ps4
