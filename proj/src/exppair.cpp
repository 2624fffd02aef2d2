#include "ps4/exppair.hpp"

#include <cctype>
#include <iterator>
#include <map>
#include <unordered_set>

#include "ps4/error.hpp"

namespace ps4 {

namespace {

// Function-local so other translation units can use it during static initialization.
const Rational& half() {
  static const Rational h = rat(1, 2);
  return h;
}

}  // namespace

ExponentPair::ExponentPair(Rational kappa, Rational lambda) : kappa_(std::move(kappa)), lambda_(std::move(lambda)) {
  if (kappa_ < 0 || kappa_ > half() || lambda_ < half() || lambda_ > 1)
    throw DomainError("not an exponent pair: " + str());
}

std::string ExponentPair::str() const { return "(" + kappa_.str() + ", " + lambda_.str() + ")"; }

ExponentPair apply_A(const ExponentPair& p) {
  Rational d = 2 * p.kappa() + 2;
  return {p.kappa() / d, (p.kappa() + p.lambda() + 1) / d};
}

ExponentPair apply_B(const ExponentPair& p) { return {p.lambda() - half(), p.kappa() + half()}; }

Word Word::parse(std::string_view text) {
  std::vector<Process> out;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  while (i < text.size()) {
    char ch = text[i];
    if (ch != 'A' && ch != 'B') throw ParseError(std::string("unexpected '") + ch + "' in word", i);
    ++i;
    skip_ws();
    bool caret = false;
    if (i < text.size() && text[i] == '^') {
      caret = true;
      ++i;
      skip_ws();
    }
    std::size_t count = 1;
    if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      std::size_t start = i;
      count = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        count = count * 10 + static_cast<std::size_t>(text[i] - '0');
        if (count > 1'000'000) throw ParseError("repeat count too large", start);
        ++i;
      }
      if (count == 0) throw ParseError("zero repeat count", start);
    } else if (caret) {
      throw ParseError("expected repeat count after '^'", i);
    }
    out.insert(out.end(), count, static_cast<Process>(ch));
    skip_ws();
  }
  return Word(std::move(out));
}

std::string Word::str() const {
  std::string out;
  for (std::size_t i = 0; i < letters_.size();) {
    std::size_t j = i;
    while (j < letters_.size() && letters_[j] == letters_[i]) ++j;
    out += static_cast<char>(letters_[i]);
    if (j - i > 1) out += std::to_string(j - i);
    i = j;
  }
  return out;
}

ExponentPair Word::apply(const ExponentPair& start) const {
  ExponentPair p = start;
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) p = *it == Process::A ? apply_A(p) : apply_B(p);
  return p;
}

Word Word::then(Process p) const {
  std::vector<Process> out;
  out.reserve(letters_.size() + 1);
  out.push_back(p);
  out.insert(out.end(), letters_.begin(), letters_.end());
  return Word(std::move(out));
}

Word operator+(const Word& a, const Word& b) {
  std::vector<Process> out = a.letters_;
  out.insert(out.end(), b.letters_.begin(), b.letters_.end());
  return Word(std::move(out));
}

Rational LinFrac::operator()(const ExponentPair& p) const {
  Rational den = q0 + qk * p.kappa() + ql * p.lambda();
  if (den.is_zero()) throw DomainError("objective denominator vanishes at " + p.str());
  return (p0 + pk * p.kappa() + pl * p.lambda()) / den;
}

LinFrac LinFrac::long_word_threshold(const Rational& sigma) {
  return {1 + 3 * sigma - rat(5, 2), 1, -1, half(), 1, 0};
}

bool objective_monotone(const LinFrac& f, Sense sense) {
  // d/dkappa ~ (pk q0 - qk p0) + (pk ql - qk pl) lambda,
  // d/dlambda ~ (pl q0 - ql p0) + (pl qk - ql pk) kappa.
  auto ok = [&](const Rational& v) { return sense == Sense::Maximize ? v <= 0 : v >= 0; };
  Rational dk0 = f.pk * f.q0 - f.qk * f.p0;
  Rational dk1 = f.pk * f.ql - f.qk * f.pl;
  Rational dl0 = f.pl * f.q0 - f.ql * f.p0;
  Rational dl1 = f.pl * f.qk - f.ql * f.pk;
  return ok(dk0 + dk1 * half()) && ok(dk0 + dk1) && ok(dl0) && ok(dl0 + dl1 * half());
}

namespace {

// Non-dominated pairs keyed by kappa; lambda strictly decreases along the map.
class ParetoFront {
 public:
  bool dominates(const ExponentPair& p) const {
    auto it = front_.upper_bound(p.kappa());
    if (it == front_.begin()) return false;
    return std::prev(it)->second <= p.lambda();
  }

  void insert(const ExponentPair& p) {
    auto [it, inserted] = front_.insert_or_assign(p.kappa(), p.lambda());
    auto next = std::next(it);
    while (next != front_.end() && next->second >= p.lambda()) next = front_.erase(next);
  }

 private:
  std::map<Rational, Rational> front_;
};

}  // namespace

SearchResult search_linfrac(const LinFrac& obj, int max_depth, Sense sense, Pruning pruning) {
  if (max_depth < 1) throw DomainError("search depth must be at least 1");
  const bool prune = pruning == Pruning::Force || (pruning == Pruning::Auto && objective_monotone(obj, sense));

  struct Node {
    ExponentPair pair;
    Word word;
  };
  std::unordered_set<ExponentPair> seen;
  ParetoFront front;
  std::vector<Node> frontier{{ExponentPair::trivial(), Word()}};

  SearchResult best;
  bool have_best = false;
  auto better = [&](const Rational& v) { return sense == Sense::Maximize ? v > best.value : v < best.value; };

  for (int depth = 1; depth <= max_depth && !frontier.empty(); ++depth) {
    std::vector<Node> next;
    for (const Node& node : frontier) {
      for (Process letter : {Process::A, Process::B}) {
        ExponentPair child = letter == Process::A ? apply_A(node.pair) : apply_B(node.pair);
        if (!seen.insert(child).second) continue;
        if (prune) {
          if (front.dominates(child)) continue;
          front.insert(child);
        }
        Rational v = obj(child);
        Word w = node.word.then(letter);
        if (!have_best || better(v)) {
          best.word = w;
          best.pair = child;
          best.value = v;
          have_best = true;
        }
        next.push_back({std::move(child), std::move(w)});
      }
    }
    frontier = std::move(next);
  }
  best.pruning_applied = prune;
  best.distinct_pairs = seen.size();
  return best;
}

}  // namespace ps4
