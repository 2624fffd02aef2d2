#include "ps4/phase.hpp"

#include <quadmath.h>

namespace ps4 {

PowDD pow_dd(double n, double c) {
  const __float128 v = expq(static_cast<__float128>(c) * logq(static_cast<__float128>(n)));
  PowDD out;
  out.hi = static_cast<double>(v);
  out.lo = static_cast<double>(v - static_cast<__float128>(out.hi));
  return out;
}

}  // namespace ps4
