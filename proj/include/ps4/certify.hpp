#pragma once

// Exact certification of the exponent bookkeeping behind the range 1 < c < 1193/889.
//
// Every estimate in the minor-arc argument reduces to an inequality between
// powers of X. Writing M = X^theta, each exponent is an affine form in (c, theta)
// and the whole argument becomes a finite system of rational inequalities:
//
//   HB-*   Heath-Brown decomposition hypotheses on U = X^u, V = X^v, Z = X^z;
//   TI-*   Type I bounds (exponent pair A^2B(0,1), then the eleven Sargos-Wu terms);
//   TII-*  Type II bounds after Cauchy and Weyl differencing with Q = X^q;
//   C2-*   the assembly of the C4^(2) estimate and the final comparison with X^{4-c}.
//
// The Type I/II constraints are "branches": their common right-hand side is the
// minor-arc exponent sigma, and sigma(c) is the largest branch value. Factors of
// X^eta and powers of log X count as exponent 0; the final comparison is strict,
// which is what makes the admissible range open.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ps4/exppair.hpp"
#include "ps4/rational.hpp"

namespace ps4 {

struct Params {
  Rational u;       // U = X^u, lower end of the Type II range
  Rational v;       // V = X^v, upper end of the Type II range
  Rational z;       // Z = X^z
  Rational theta1;  // Type I split between the exponent-pair and Sargos-Wu branches
  Rational theta2;  // Type I upper range, 1 - z
  Rational q_exp;   // differencing length Q = X^q, tied to u

  // u = 304/2667, v = 1147/2667, z = 2363/5334, theta1 = 4961/10668.
  static Params defaults();
  // Fills theta2 = 1 - z and q_exp = u.
  static Params from(Rational u, Rational v, Rational z, Rational theta1);

  // 0 < u <= theta1 <= theta2 < 1, u <= v, q_exp == u, theta2 == 1 - z.
  bool valid() const;
  void validate() const;  // throws DomainError naming the broken relation
};

struct PairSet {
  ExponentPair type_i = ExponentPair::trivial();     // A^2B(0,1)
  ExponentPair type_ii = ExponentPair::trivial();    // AB(0,1)
  ExponentPair long_word = ExponentPair::trivial();  // BA^3BA^2BABABA^2BABAB(0,1)

  static PairSet defaults();
};

enum class ConstraintKind { Hypothesis, Branch, Assembly };

struct ThetaRange {
  Rational lo;
  Rational hi;
};

// lhs + lhs_sigma*sigma  <=  rhs + rhs_sigma*sigma   (strict when flagged),
// with lhs supremized over theta_range when present.
struct Constraint {
  std::string name;
  ConstraintKind kind = ConstraintKind::Assembly;
  AffineCT lhs;
  Rational lhs_sigma;
  AffineCT rhs;
  Rational rhs_sigma;
  std::optional<ThetaRange> theta_range;
  bool strict = false;

  // Both sides coincide symbolically; such a constraint always has zero slack.
  bool is_identity() const;
  // Neither c nor sigma appears.
  bool is_constant() const;
  // lhs as an affine form in c with theta fixed at its maximizing endpoint.
  AffineCT sup_form() const;
};

// Moment exponents taken as given: int |S^2 Phi| << X^{m2}, int |S^4 Phi| << X^{m4}.
struct MomentAxioms {
  AffineCT m2;
  AffineCT m4;
  bool assumed = true;
};

struct CertSystem {
  Params params;
  PairSet pairs;
  std::vector<Constraint> constraints;
  MomentAxioms axioms;

  const Constraint& get(const std::string& name) const;  // throws DomainError
  std::vector<const Constraint*> branches() const;
};

CertSystem build_system(const PairSet& pairs, const Params& params);

// Largest branch value at c, each branch supremized over its theta range.
Rational sigma_of_c(const CertSystem& sys, const Rational& c);

struct SlackEntry {
  std::string name;
  ConstraintKind kind;
  Rational lhs;  // supremized left side, sigma substituted
  Rational rhs;
  std::optional<Rational> sup_at;
  Rational slack;  // rhs - lhs
  bool strict = false;
  bool identity = false;
  bool binding = false;
};

struct CertReport {
  Rational c;
  Rational sigma;
  std::vector<SlackEntry> entries;
  std::vector<std::string> binding;  // zero slack, excluding hypotheses and identities
  bool feasible = false;             // every slack >= 0
  bool admissible = false;           // feasible and every strict slack > 0

  const SlackEntry& get(const std::string& name) const;
};

CertReport verify_at(const CertSystem& sys, const Rational& c);

struct Threshold {
  Rational cstar;
  std::vector<std::string> binding;
};

// Supremum of c in (1, 2) satisfying every constraint; 2 when nothing depends on c.
// Throws DomainError if a hypothesis fails or a constraint decreases in c.
Threshold threshold_c(const CertSystem& sys);

struct ConstraintThreshold {
  std::string name;
  Rational c;  // 2 when the constraint never binds in (1, 2)
};

// Individual threshold of each c-dependent constraint. Assembly constraints use
// sigma(c) of the whole system; a branch is compared against sigma's value as
// c -> 1+, i.e. the c at which that single branch would start to raise sigma.
std::vector<ConstraintThreshold> constraint_thresholds(const CertSystem& sys);

enum class FreeParam { U, V, Z, Theta1 };

const char* to_string(FreeParam p);
FreeParam parse_free_param(const std::string& name);

struct TuneResult {
  Params params;
  Rational cstar;
  std::vector<std::string> binding;
  std::size_t evaluated = 0;  // grid points that passed the hypotheses
};

// Grid search over the free parameters (multiples of step inside (0, 1)), others
// fixed at base. Maximizes threshold_c; ties go to the lexicographically largest
// (u, v, z, theta1). Optimality is only claimed relative to the grid.
TuneResult tune(std::span<const FreeParam> free, const Rational& step, const PairSet& pairs,
                const Params& base = Params::defaults());

}  // namespace ps4
