#pragma once

// Exact rationals and affine forms in the two symbolic exponents c and theta.
//
// Every exponent the certifier manipulates (2515/2667, 1193/889, ...) lives here.
// No operation rounds; denominators grow as needed.

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ps4 {

class Rational {
 public:
  using Int = boost::multiprecision::cpp_int;

  Rational() = default;
  Rational(std::int64_t n) : v_(n) {}  // NOLINT: integers convert implicitly
  Rational(int n) : v_(n) {}           // NOLINT
  Rational(const Int& num, const Int& den);

  // Accepts "num/den" or a bare integer, optional leading sign.
  static Rational parse(std::string_view text);

  Int num() const { return boost::multiprecision::numerator(v_); }
  Int den() const { return boost::multiprecision::denominator(v_); }

  int sign() const { return v_.sign(); }
  bool is_zero() const { return v_.is_zero(); }
  Rational abs() const;
  double to_double() const;
  long double to_long_double() const;

  // "num/den", or "num" when the denominator is 1.
  std::string str() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);  // throws DomainError on zero divisor

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

  std::size_t hash() const;

 private:
  using Rep = boost::multiprecision::cpp_rational;
  explicit Rational(Rep v) : v_(std::move(v)) {}
  Rep v_;
};

inline Rational rat(std::int64_t num, std::int64_t den) { return Rational(Rational::Int(num), Rational::Int(den)); }

Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

// Exact c0 + cc*c + ct*theta.
struct AffineCT {
  Rational c0;
  Rational cc;
  Rational ct;

  static AffineCT constant(Rational v) { return {std::move(v), 0, 0}; }
  static AffineCT c() { return {0, 1, 0}; }
  static AffineCT theta() { return {0, 0, 1}; }

  Rational eval(const Rational& c, const Rational& theta) const { return c0 + cc * c + ct * theta; }
  // Fixes theta, leaving an affine form in c alone.
  AffineCT at_theta(const Rational& theta) const { return {c0 + ct * theta, cc, 0}; }
  bool depends_on_c() const { return !cc.is_zero(); }
  bool depends_on_theta() const { return !ct.is_zero(); }

  AffineCT& operator+=(const AffineCT& o);
  AffineCT& operator-=(const AffineCT& o);
  AffineCT& operator*=(const Rational& k);
  friend AffineCT operator+(AffineCT a, const AffineCT& b) { return a += b; }
  friend AffineCT operator-(AffineCT a, const AffineCT& b) { return a -= b; }
  friend AffineCT operator*(AffineCT a, const Rational& k) { return a *= k; }
  friend AffineCT operator*(const Rational& k, AffineCT a) { return a *= k; }
  friend AffineCT operator/(AffineCT a, const Rational& k) { return a *= Rational(1) / k; }
  AffineCT operator-() const { return {-c0, -cc, -ct}; }
  friend bool operator==(const AffineCT&, const AffineCT&) = default;

  // Human-readable, e.g. "5/7 + 1/14*c + 2/7*theta".
  std::string str() const;
};

inline Rational affine_eval(const AffineCT& e, const Rational& c, const Rational& theta) { return e.eval(c, theta); }

struct SupResult {
  Rational value;
  Rational at;
};

// Maximum of theta -> e(c, theta) over [lo, hi]. A zero theta coefficient reports lo.
SupResult affine_sup_on_theta(const AffineCT& e, const Rational& c, const Rational& lo, const Rational& hi);

// The c solving lhs(c, theta) == rhs(c, theta), or nullopt for parallel forms.
std::optional<Rational> solve_c(const AffineCT& lhs, const AffineCT& rhs, const Rational& theta);

}  // namespace ps4

template <>
struct std::hash<ps4::Rational> {
  std::size_t operator()(const ps4::Rational& r) const noexcept { return r.hash(); }
};
