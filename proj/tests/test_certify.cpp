#include <algorithm>

#include "doctest.h"
#include "oracles.hpp"
#include "ps4/certify.hpp"
#include "ps4/error.hpp"

using namespace ps4;

namespace {

const Rational kCstar = rat(1193, 889);
const Rational kSigma = rat(2515, 2667);

const CertSystem& default_system() {
  static const CertSystem sys = build_system(PairSet::defaults(), Params::defaults());
  return sys;
}

// Largest branch value, every branch evaluated at both ends of its theta range.
Rational sigma_endpoints(const CertSystem& sys, const Rational& c) {
  std::optional<Rational> best;
  for (const Constraint& k : sys.constraints) {
    if (k.kind != ConstraintKind::Branch) continue;
    std::vector<Rational> vals;
    if (k.theta_range) {
      vals.push_back(k.lhs.eval(c, k.theta_range->lo));
      vals.push_back(k.lhs.eval(c, k.theta_range->hi));
    } else {
      vals.push_back(k.lhs.eval(c, 0));
    }
    for (auto& v : vals)
      if (!best || v > *best) best = v;
  }
  return *best;
}

bool has(const std::vector<std::string>& names, const std::string& n) {
  return std::find(names.begin(), names.end(), n) != names.end();
}

Rational random_c(oracle::Gen& g) {
  std::int64_t d = g.integer(2, 5000);
  return rat(d + g.integer(1, d - 1), d);
}

}  // namespace

TEST_CASE("default system layout") {
  const auto& sys = default_system();
  CHECK(sys.constraints.size() == 22);
  int hyp = 0, br = 0, as = 0;
  for (const auto& k : sys.constraints) {
    if (k.kind == ConstraintKind::Hypothesis) ++hyp;
    if (k.kind == ConstraintKind::Branch) ++br;
    if (k.kind == ConstraintKind::Assembly) ++as;
  }
  CHECK(hyp == 4);
  CHECK(br == 1 + 11 + 3);
  CHECK(as == 3);
  for (int i = 1; i <= 11; ++i) CHECK_NOTHROW(sys.get("TI-b" + std::to_string(i)));
  CHECK_THROWS_AS(sys.get("TI-b12"), DomainError);
  CHECK(sys.axioms.assumed);
  CHECK(sys.axioms.m2 == AffineCT::constant(1));
  CHECK(sys.axioms.m4 == AffineCT::constant(4) - AffineCT::c());
}

TEST_CASE("parameter identities") {
  const Params p = Params::defaults();
  CHECK(p.valid());
  CHECK(p.theta2 == rat(2971, 5334));
  CHECK(2 * p.z + p.u == 1);
  CHECK(2 * p.u < p.z);
  CHECK(3 * p.v > 1);
  auto rep = verify_at(default_system(), rat(6, 5));
  CHECK(rep.get("HB-1").slack == 0);
  CHECK(rep.get("HB-2").slack > 0);
  CHECK(rep.get("HB-3").slack > 0);

  Params bad = p;
  bad.q_exp = rat(1, 10);
  CHECK_FALSE(bad.valid());
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK_THROWS_AS(Params::from(rat(1, 2), rat(1, 2), rat(1, 3), rat(1, 4)).validate(), DomainError);
}

TEST_CASE("quoted branch forms") {
  const auto& sys = default_system();
  const auto c = AffineCT::c(), th = AffineCT::theta(), one = AffineCT::constant(1);
  CHECK(sys.get("TI-b1").lhs == (4 * c + AffineCT::constant(34) - 3 * th) / Rational(42));
  CHECK(sys.get("TI-b5").lhs == (c + AffineCT::constant(6) + 3 * th) / Rational(10));
  CHECK(sys.get("TI-b9").lhs == one - th / Rational(2));
  CHECK(sys.get("TI-b10").lhs == (one + th) / Rational(2));
  CHECK(sys.get("TI-b11").lhs == AffineCT::constant(rat(1, 2)));
  CHECK(sys.get("TII-a").lhs == AffineCT::constant(kSigma));
  CHECK(verify_at(sys, rat(6, 5)).get("TI-b9").lhs == rat(16375, 21336));
}

TEST_CASE("long-word assembly identity") {
  // (1731c + 633)/4492 + (5 - c)/2 == (11863 - 515c)/4492, coefficient-wise
  const auto& k = default_system().get("C2-long");
  AffineCT want{rat(11863, 4492), rat(-515, 4492), 0};
  CHECK(k.lhs == want);
  CHECK(default_system().get("C2-tail").is_identity());
  CHECK(1 + 3 * kSigma == rat(3404, 889));
  CHECK(3 * kSigma == rat(2515, 889));
}

TEST_CASE("sigma") {
  const auto& sys = default_system();
  CHECK(sigma_of_c(sys, kCstar) == kSigma);
  CHECK(sigma_of_c(sys, rat(6, 5)) == sigma_endpoints(sys, rat(6, 5)));
  oracle::Gen g(31);
  for (int i = 0; i < 100; ++i) {
    Rational c = random_c(g);
    Rational s = sigma_of_c(sys, c);
    CHECK(s == sigma_endpoints(sys, c));
    CHECK(s >= kSigma);  // TII-a does not depend on c
  }
  CHECK_THROWS_AS(sigma_of_c(sys, 2), DomainError);
}

TEST_CASE("verify at the threshold and either side") {
  const auto& sys = default_system();
  auto at = verify_at(sys, kCstar);
  CHECK(at.feasible);
  CHECK_FALSE(at.admissible);
  CHECK(at.sigma == kSigma);
  CHECK(at.binding == std::vector<std::string>{"TI-a", "TII-a", "TII-b", "C2-long", "C2-final"});
  for (const auto& e : at.entries) CHECK(e.slack == e.rhs - e.lhs);

  auto inside = verify_at(sys, rat(97, 81));
  CHECK(inside.feasible);
  CHECK(inside.admissible);
  for (const auto& e : inside.entries) {
    if (e.identity || e.kind != ConstraintKind::Assembly) continue;
    CHECK(e.slack > 0);
  }

  auto outside = verify_at(sys, rat(3, 2));
  CHECK_FALSE(outside.feasible);
  CHECK(outside.get("C2-final").slack < 0);
}

TEST_CASE("feasibility is monotone in c") {
  const auto& sys = default_system();
  oracle::Gen g(32);
  for (int i = 0; i < 50; ++i) {
    Rational a = random_c(g), b = random_c(g);
    if (b < a) std::swap(a, b);
    if (verify_at(sys, b).feasible) CHECK(verify_at(sys, a).feasible);
    CHECK(verify_at(sys, a).feasible == (a <= kCstar));
  }
}

TEST_CASE("threshold") {
  auto t = threshold_c(default_system());
  CHECK(t.cstar == kCstar);
  for (auto n : {"TI-a", "TII-b", "C2-long", "C2-final"}) CHECK(has(t.binding, n));

  PairSet weaker = PairSet::defaults();
  weaker.long_word = ExponentPair(rat(1, 2), rat(1, 2));
  CHECK(threshold_c(build_system(weaker, Params::defaults())).cstar < kCstar);

  CertSystem hb = default_system();
  std::erase_if(hb.constraints, [](const Constraint& k) { return k.kind != ConstraintKind::Hypothesis; });
  auto free = threshold_c(hb);
  CHECK(free.cstar == 2);
  CHECK(free.binding.empty());
}

TEST_CASE("redundant constraints leave the threshold alone") {
  oracle::Gen g(33);
  for (int i = 0; i < 20; ++i) {
    CertSystem sys = default_system();
    // k c <= k t with t strictly between cstar and 2
    Rational t = kCstar + (2 - kCstar) * rat(g.integer(1, 99), 100);
    Rational k = rat(g.integer(1, 50), g.integer(1, 50));
    sys.constraints.push_back({"extra", ConstraintKind::Assembly, k * AffineCT::c(), 0, AffineCT::constant(k * t), 0,
                               std::nullopt, false});
    auto th = threshold_c(sys);
    CHECK(th.cstar == kCstar);
  }
}

TEST_CASE("per-term Type I thresholds") {
  auto all = constraint_thresholds(default_system());
  int seen = 0;
  Rational lowest = 2;
  for (const auto& t : all) {
    lowest = min(lowest, t.c);
    if (t.name.rfind("TI-b", 0) == 0) {
      ++seen;
      CHECK(t.c >= kCstar);
    }
  }
  CHECK(seen == 11);
  CHECK(lowest == kCstar);
}

TEST_CASE("tune") {
  const auto pairs = PairSet::defaults();
  auto none = tune({}, rat(1, 5334), pairs);
  CHECK(none.cstar == kCstar);
  CHECK(none.params.u == Params::defaults().u);

  FreeParam u[] = {FreeParam::U};
  auto tu = tune(u, rat(1, 5334), pairs);
  CHECK(tu.params.u == rat(304, 2667));
  CHECK(tu.cstar == kCstar);

  FreeParam th[] = {FreeParam::Theta1};
  auto tt = tune(th, rat(1, 10668), pairs);
  CHECK(tt.params.theta1 == rat(4961, 10668));
  CHECK(tt.cstar == kCstar);

  CHECK_THROWS_AS(tune(u, 0, pairs), DomainError);
  CHECK_THROWS_AS(parse_free_param("w"), DomainError);
}
