#include "ps4/certify.hpp"

#include <algorithm>
#include <array>
#include <tuple>

#include "ps4/error.hpp"
#include "ps4/parallel.hpp"

namespace ps4 {

namespace {

// Function-local so other translation units can use it during static initialization.
const Rational& half() {
  static const Rational h = rat(1, 2);
  return h;
}

void require_c(const Rational& c) {
  if (c <= 1 || c >= 2) throw DomainError("c = " + c.str() + " outside (1, 2)");
}

// Sargos-Wu term (F^f M^m L^l)^{1/root}. F = |x| X^c ranges over [X, K X^c] on
// the minor arcs, so positive powers of F use exponent c and negative powers use 1.
struct SargosWuTerm {
  Rational f, m, l, root;
};

const std::array<SargosWuTerm, 11>& sargos_wu() {
  static const std::array<SargosWuTerm, 11> terms = {{
    {4, 31, 34, 42},
    {6, 53, 51, 66},
    {6, 46, 41, 56},
    {2, 38, 29, 40},
    {1, 9, 6, 10},
    {2, 7, 6, 10},
    {3, 43, 32, 46},
    {1, 6, 6, 8},
    {0, half(), 1, 1},
    {0, 1, half(), 1},
    {-half(), 1, 1, 1},
  }};
  return terms;
}

AffineCT constant(const Rational& v) { return AffineCT::constant(v); }

Constraint hypothesis(std::string name, AffineCT lhs, AffineCT rhs) {
  return {std::move(name), ConstraintKind::Hypothesis, std::move(lhs), 0, std::move(rhs), 0, std::nullopt, false};
}

Constraint branch(std::string name, AffineCT lhs, std::optional<ThetaRange> range) {
  return {std::move(name), ConstraintKind::Branch, std::move(lhs), 0, constant(0), 1, std::move(range), false};
}

struct Line {
  AffineCT form;  // affine in c only
  std::size_t index;
};

// Upper envelope of branch lines over [1, 2] as consecutive pieces.
struct Piece {
  Rational lo, hi;
  AffineCT form;
};

std::vector<Piece> sigma_envelope(const std::vector<Line>& lines) {
  std::vector<Piece> pieces;
  if (lines.empty()) return pieces;
  Rational at = 1;
  auto value = [&](const Line& l, const Rational& c) { return l.form.eval(c, 0); };
  // Active line at c = 1: largest value, then largest slope.
  const Line* active = &lines.front();
  for (const Line& l : lines) {
    Rational a = value(l, at), b = value(*active, at);
    if (a > b || (a == b && l.form.cc > active->form.cc)) active = &l;
  }
  while (true) {
    std::optional<Rational> next;
    const Line* successor = nullptr;
    for (const Line& l : lines) {
      if (l.form.cc <= active->form.cc) continue;
      Rational x = -(l.form.c0 - active->form.c0) / (l.form.cc - active->form.cc);
      if (x < at) continue;  // already above would contradict the choice of active
      if (!next || x < *next || (x == *next && l.form.cc > successor->form.cc)) {
        next = x;
        successor = &l;
      }
    }
    if (!next || *next >= 2) {
      pieces.push_back({at, 2, active->form});
      break;
    }
    if (*next > at) pieces.push_back({at, *next, active->form});
    at = *next;
    active = successor;
  }
  return pieces;
}

std::vector<Line> branch_lines(const CertSystem& sys) {
  std::vector<Line> lines;
  for (std::size_t i = 0; i < sys.constraints.size(); ++i)
    if (sys.constraints[i].kind == ConstraintKind::Branch) lines.push_back({sys.constraints[i].sup_form(), i});
  return lines;
}

// Supremum of {c in [1, 2] : g(c) <= 0} for g = lhs - rhs with sigma expanded on
// each envelope piece. Throws if g decreases anywhere.
Rational constraint_threshold(const Constraint& k, const std::vector<Piece>& envelope) {
  AffineCT base = k.sup_form() - k.rhs;
  Rational sigma_coef = k.lhs_sigma - k.rhs_sigma;
  std::vector<Piece> pieces = envelope;
  if (sigma_coef.is_zero() || pieces.empty()) {
    if (!sigma_coef.is_zero()) throw DomainError(k.name + " refers to sigma but the system has no branches");
    pieces = {{1, 2, constant(0)}};
  }
  for (const Piece& p : pieces) {
    AffineCT g = base + p.form * sigma_coef;
    if (g.cc.sign() < 0) throw DomainError(k.name + " is not monotone in c");
    if (g.eval(p.hi, 0) <= 0) continue;
    if (g.eval(p.lo, 0) > 0) return p.lo;
    return -g.c0 / g.cc;
  }
  return 2;
}

// Name of the first c-independent constraint that fails, if any.
std::optional<std::string> failed_hypothesis(const CertSystem& sys) {
  for (const Constraint& k : sys.constraints) {
    if (!k.is_constant() || k.is_identity()) continue;
    Rational slack = k.rhs.c0 - k.sup_form().c0;
    if (slack.sign() < 0 || (k.strict && slack.is_zero())) return k.name;
  }
  return std::nullopt;
}

}  // namespace

Params Params::defaults() { return from(rat(304, 2667), rat(1147, 2667), rat(2363, 5334), rat(4961, 10668)); }

Params Params::from(Rational u, Rational v, Rational z, Rational theta1) {
  Params p;
  p.theta2 = 1 - z;
  p.q_exp = u;
  p.u = std::move(u);
  p.v = std::move(v);
  p.z = std::move(z);
  p.theta1 = std::move(theta1);
  return p;
}

void Params::validate() const {
  if (!(u > 0)) throw DomainError("u must be positive");
  if (!(u <= theta1)) throw DomainError("u must not exceed theta1");
  if (!(theta1 <= theta2)) throw DomainError("theta1 must not exceed theta2");
  if (!(theta2 < 1)) throw DomainError("theta2 must be below 1");
  if (!(u <= v)) throw DomainError("u must not exceed v");
  if (q_exp != u) throw DomainError("q_exp must equal u");
  if (theta2 != 1 - z) throw DomainError("theta2 must equal 1 - z");
}

bool Params::valid() const {
  return u > 0 && u <= theta1 && theta1 <= theta2 && theta2 < 1 && u <= v && q_exp == u && theta2 == 1 - z;
}

PairSet PairSet::defaults() {
  return {eval_word(Word::parse("A2B")), eval_word(Word::parse("AB")), eval_word(Word::parse("BA3BA2BABABA2BABAB"))};
}

bool Constraint::is_identity() const {
  return !theta_range && lhs == rhs && lhs_sigma == rhs_sigma;
}

bool Constraint::is_constant() const {
  return !lhs.depends_on_c() && !rhs.depends_on_c() && lhs_sigma.is_zero() && rhs_sigma.is_zero();
}

AffineCT Constraint::sup_form() const {
  if (!theta_range) return lhs;
  return lhs.at_theta(lhs.ct.sign() > 0 ? theta_range->hi : theta_range->lo);
}

const Constraint& CertSystem::get(const std::string& name) const {
  for (const auto& k : constraints)
    if (k.name == name) return k;
  throw DomainError("no constraint named " + name);
}

std::vector<const Constraint*> CertSystem::branches() const {
  std::vector<const Constraint*> out;
  for (const auto& k : constraints)
    if (k.kind == ConstraintKind::Branch) out.push_back(&k);
  return out;
}

CertSystem build_system(const PairSet& pairs, const Params& params) {
  params.validate();
  CertSystem sys{params, pairs, {}, {}};
  const AffineCT c = AffineCT::c();
  const AffineCT theta = AffineCT::theta();
  const AffineCT one = constant(1);
  sys.axioms = {one, constant(4) - c, true};
  auto& out = sys.constraints;

  // X >> Z^2 U, Z >> U^2, V^3 >> X, and the Type I split ordering.
  out.push_back(hypothesis("HB-1", constant(2 * params.z + params.u), one));
  out.push_back(hypothesis("HB-2", constant(2 * params.u), constant(params.z)));
  out.push_back(hypothesis("HB-3", one, constant(3 * params.v)));
  out.push_back(hypothesis("HB-4", constant(params.theta1), constant(params.theta2)));

  // Type I, M <= X^theta1: inner sum over L = X^{1-theta} with the pair (k, l) and
  // derivative size |x| X^c / L, summed trivially over m.
  {
    const auto& k = pairs.type_i.kappa();
    const auto& l = pairs.type_i.lambda();
    AffineCT e = c * k + (one - theta) * (l - k) + theta;
    out.push_back(branch("TI-a", e, ThetaRange{0, params.theta1}));
  }

  // Type I, X^theta1 <= M <= X^theta2: Sargos-Wu with L = X^{1-theta}.
  for (std::size_t i = 0; i < sargos_wu().size(); ++i) {
    const auto& t = sargos_wu()[i];
    AffineCT f = t.f.sign() >= 0 ? c : one;
    AffineCT e = (f * t.f + theta * t.m + (one - theta) * t.l) / t.root;
    out.push_back(branch("TI-b" + std::to_string(i + 1), e, ThetaRange{params.theta1, params.theta2}));
  }

  // Type II after Cauchy and differencing with Q = X^q, M = X^theta in [U, V].
  {
    const Rational& q = params.q_exp;
    const auto& k = pairs.type_ii.kappa();
    const auto& l = pairs.type_ii.lambda();
    ThetaRange range{params.u, params.v};
    out.push_back(branch("TII-a", constant((2 - q) / 2), std::nullopt));
    AffineCT b = (one + constant(q * k) + (c - one) * k + constant(l) + theta * (1 - l)) / 2;
    out.push_back(branch("TII-b", b, range));
    out.push_back(branch("TII-c", (one + theta - constant(q)) / 2, range));
  }

  // Assembly. The cube moment int |S^3 Phi| << X^{(m2 + m4)/2} by Cauchy; the
  // near-diagonal piece contributes eps X^{1 + 3 sigma - c}.
  {
    const auto& k = pairs.long_word.kappa();
    const auto& l = pairs.long_word.lambda();
    AffineCT cube = (sys.axioms.m2 + sys.axioms.m4) / 2;
    AffineCT near = one - c;  // + 3 sigma
    out.push_back({"C2-long", ConstraintKind::Assembly, c * k + constant(l - k) + cube, 0, near, 3, std::nullopt, false});
    out.push_back({"C2-tail", ConstraintKind::Assembly, near, 3, near, 3, std::nullopt, false});
    AffineCT final_lhs = constant(half()) + cube / 2 + near / 2;
    out.push_back({"C2-final", ConstraintKind::Assembly, final_lhs, rat(3, 2), constant(4) - c, 0, std::nullopt, true});
  }
  return sys;
}

Rational sigma_of_c(const CertSystem& sys, const Rational& c) {
  require_c(c);
  std::optional<Rational> best;
  for (const Constraint* b : sys.branches()) {
    Rational v = b->sup_form().eval(c, 0);
    if (!best || v > *best) best = v;
  }
  if (!best) throw DomainError("system has no branch constraints");
  return *best;
}

const SlackEntry& CertReport::get(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw DomainError("no constraint named " + name);
}

CertReport verify_at(const CertSystem& sys, const Rational& c) {
  require_c(c);
  CertReport rep;
  rep.c = c;
  bool has_branches = !sys.branches().empty();
  rep.sigma = has_branches ? sigma_of_c(sys, c) : Rational(0);
  rep.feasible = true;
  rep.admissible = true;
  for (const Constraint& k : sys.constraints) {
    if (!has_branches && !(k.lhs_sigma.is_zero() && k.rhs_sigma.is_zero()))
      throw DomainError(k.name + " refers to sigma but the system has no branches");
    SlackEntry e;
    e.name = k.name;
    e.kind = k.kind;
    e.strict = k.strict;
    e.identity = k.is_identity();
    if (k.theta_range) {
      auto sup = affine_sup_on_theta(k.lhs, c, k.theta_range->lo, k.theta_range->hi);
      e.lhs = sup.value;
      e.sup_at = sup.at;
    } else {
      e.lhs = k.lhs.eval(c, 0);
    }
    e.lhs += k.lhs_sigma * rep.sigma;
    e.rhs = k.rhs.eval(c, 0) + k.rhs_sigma * rep.sigma;
    e.slack = e.rhs - e.lhs;
    e.binding = e.slack.is_zero() && k.kind != ConstraintKind::Hypothesis && !e.identity;
    if (e.slack.sign() < 0) rep.feasible = false;
    if (e.slack.sign() < 0 || (k.strict && e.slack.is_zero())) rep.admissible = false;
    if (e.binding) rep.binding.push_back(e.name);
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

Threshold threshold_c(const CertSystem& sys) {
  if (auto failed = failed_hypothesis(sys)) throw DomainError("hypothesis " + *failed + " fails");
  std::vector<Piece> envelope = sigma_envelope(branch_lines(sys));
  Rational cstar = 2;
  for (const Constraint& k : sys.constraints) {
    if (k.kind == ConstraintKind::Branch || k.is_constant() || k.is_identity()) continue;
    cstar = min(cstar, constraint_threshold(k, envelope));
  }

  Threshold out{cstar, {}};
  if (cstar <= 1 || cstar >= 2) return out;
  CertReport at = verify_at(sys, cstar);
  if (!at.feasible) throw NumericError("threshold " + cstar.str() + " failed re-verification");
  Rational beyond = cstar + rat(1, 1'000'000);
  if (beyond < 2 && verify_at(sys, beyond).feasible)
    throw NumericError("system still feasible above threshold " + cstar.str());
  out.binding = at.binding;
  return out;
}

std::vector<ConstraintThreshold> constraint_thresholds(const CertSystem& sys) {
  std::vector<Line> lines = branch_lines(sys);
  std::vector<Piece> envelope = sigma_envelope(lines);
  std::vector<ConstraintThreshold> out;
  std::optional<Rational> floor;
  if (!envelope.empty()) floor = envelope.front().form.eval(1, 0);
  for (const Constraint& k : sys.constraints) {
    if (k.is_constant() || k.is_identity()) continue;
    if (k.kind == ConstraintKind::Branch) {
      AffineCT g = k.sup_form() - constant(*floor);
      Rational t = g.eval(1, 0) > 0 ? Rational(1) : Rational(2);
      if (g.cc.sign() > 0 && g.eval(2, 0) > 0) t = max(Rational(1), -g.c0 / g.cc);
      out.push_back({k.name, t});
    } else {
      out.push_back({k.name, constraint_threshold(k, envelope)});
    }
  }
  return out;
}

const char* to_string(FreeParam p) {
  switch (p) {
    case FreeParam::U: return "u";
    case FreeParam::V: return "v";
    case FreeParam::Z: return "z";
    case FreeParam::Theta1: return "theta1";
  }
  return "?";
}

FreeParam parse_free_param(const std::string& name) {
  if (name == "u") return FreeParam::U;
  if (name == "v") return FreeParam::V;
  if (name == "z") return FreeParam::Z;
  if (name == "theta1") return FreeParam::Theta1;
  throw DomainError("unknown free parameter '" + name + "' (expected u, v, z or theta1)");
}

TuneResult tune(std::span<const FreeParam> free, const Rational& step, const PairSet& pairs, const Params& base) {
  if (step <= 0 || step >= 1) throw DomainError("grid step must lie in (0, 1)");
  // Grid values k*step for k = 1, 2, ... while below 1.
  Rational count_r = (Rational(1) / step);
  std::size_t per_axis = static_cast<std::size_t>(count_r.to_double());
  if (step * Rational(static_cast<std::int64_t>(per_axis)) >= 1) --per_axis;
  std::size_t total = 1;
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (per_axis != 0 && total > 50'000'000 / per_axis) throw DomainError("tuning grid too large");
    total *= per_axis;
  }

  struct Best {
    std::optional<TuneResult> result;
    std::size_t evaluated = 0;
  };
  auto key = [](const Params& p) { return std::tie(p.u, p.v, p.z, p.theta1); };
  auto improves = [&](const TuneResult& cand, const std::optional<TuneResult>& cur) {
    if (!cur) return true;
    if (cand.cstar != cur->cstar) return cand.cstar > cur->cstar;
    return key(cand.params) > key(cur->params);
  };

  std::vector<Best> shards(thread_count());
  parallel_ranges(total, [&](std::size_t begin, std::size_t end, std::size_t shard) {
    Best& best = shards[shard];
    for (std::size_t idx = begin; idx < end; ++idx) {
      Rational u = base.u, v = base.v, z = base.z, t1 = base.theta1;
      std::size_t rest = idx;
      for (FreeParam f : free) {
        Rational val = step * Rational(static_cast<std::int64_t>(rest % per_axis + 1));
        rest /= per_axis;
        switch (f) {
          case FreeParam::U: u = val; break;
          case FreeParam::V: v = val; break;
          case FreeParam::Z: z = val; break;
          case FreeParam::Theta1: t1 = val; break;
        }
      }
      Params p = Params::from(u, v, z, t1);
      if (!p.valid()) continue;
      CertSystem sys = build_system(pairs, p);
      if (failed_hypothesis(sys)) continue;
      Threshold th = threshold_c(sys);
      ++best.evaluated;
      TuneResult cand{p, th.cstar, th.binding, 0};
      if (improves(cand, best.result)) best.result = std::move(cand);
    }
  });

  std::optional<TuneResult> best;
  std::size_t evaluated = 0;
  for (auto& s : shards) {
    evaluated += s.evaluated;
    if (s.result && improves(*s.result, best)) best = std::move(s.result);
  }
  if (!best) throw DomainError("no admissible parameter vector on the grid");
  best->evaluated = evaluated;
  return *best;
}

}  // namespace ps4
