#include "ps4/rational.hpp"

#include <cctype>

#include "ps4/error.hpp"

namespace ps4 {

Rational::Rational(const Int& num, const Int& den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  // boost::rational rejects negative denominators of unbounded integer types
  v_ = den < 0 ? Rep(-num, -den) : Rep(num, den);
}

Rational Rational::parse(std::string_view text) {
  auto parse_int = [&](std::string_view s, std::size_t base) -> Int {
    if (s.empty()) throw ParseError("expected an integer in '" + std::string(text) + "'", base);
    std::size_t i = 0;
    bool neg = false;
    if (s[0] == '+' || s[0] == '-') {
      neg = s[0] == '-';
      i = 1;
    }
    if (i == s.size()) throw ParseError("expected digits in '" + std::string(text) + "'", base + i);
    Int v = 0;
    for (; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i])))
        throw ParseError("unexpected character in rational '" + std::string(text) + "'", base + i);
      v = v * 10 + (s[i] - '0');
    }
    return neg ? Int(-v) : v;
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, 0), Int(1));
  Int num = parse_int(text.substr(0, slash), 0);
  Int den = parse_int(text.substr(slash + 1), slash + 1);
  return Rational(num, den);
}

Rational Rational::abs() const { return v_.sign() < 0 ? -*this : *this; }

double Rational::to_double() const { return v_.convert_to<double>(); }

long double Rational::to_long_double() const { return v_.convert_to<long double>(); }

std::string Rational::str() const {
  Int d = den();
  if (d == 1) return num().str();
  return num().str() + "/" + d.str();
}

Rational Rational::operator-() const { return Rational(Rep(-v_)); }

Rational& Rational::operator+=(const Rational& o) {
  v_ += o.v_;
  return *this;
}

Rational& Rational::operator-=(const Rational& o) {
  v_ -= o.v_;
  return *this;
}

Rational& Rational::operator*=(const Rational& o) {
  v_ *= o.v_;
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw DomainError("rational division by zero");
  v_ /= o.v_;
  return *this;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  if (a.v_ < b.v_) return std::strong_ordering::less;
  if (a.v_ > b.v_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::size_t Rational::hash() const { return std::hash<std::string>{}(str()); }

Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

AffineCT& AffineCT::operator+=(const AffineCT& o) {
  c0 += o.c0;
  cc += o.cc;
  ct += o.ct;
  return *this;
}

AffineCT& AffineCT::operator-=(const AffineCT& o) {
  c0 -= o.c0;
  cc -= o.cc;
  ct -= o.ct;
  return *this;
}

AffineCT& AffineCT::operator*=(const Rational& k) {
  c0 *= k;
  cc *= k;
  ct *= k;
  return *this;
}

std::string AffineCT::str() const {
  std::string out;
  auto term = [&](const Rational& k, const char* sym) {
    if (k.is_zero()) return;
    Rational mag = k.abs();
    if (out.empty()) {
      if (k.sign() < 0) out += "-";
    } else {
      out += k.sign() < 0 ? " - " : " + ";
    }
    if (sym == nullptr) {
      out += mag.str();
    } else {
      if (mag != 1) out += mag.str() + "*";
      out += sym;
    }
  };
  term(c0, nullptr);
  term(cc, "c");
  term(ct, "theta");
  return out.empty() ? "0" : out;
}

SupResult affine_sup_on_theta(const AffineCT& e, const Rational& c, const Rational& lo, const Rational& hi) {
  if (hi < lo) throw DomainError("theta range [" + lo.str() + ", " + hi.str() + "] is empty");
  const Rational& at = e.ct.sign() > 0 ? hi : lo;
  return {e.eval(c, at), at};
}

std::optional<Rational> solve_c(const AffineCT& lhs, const AffineCT& rhs, const Rational& theta) {
  AffineCT d = (lhs - rhs).at_theta(theta);
  if (d.cc.is_zero()) return std::nullopt;
  return -d.c0 / d.cc;
}

}  // namespace ps4
