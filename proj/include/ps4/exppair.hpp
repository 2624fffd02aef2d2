#pragma once

// Van der Corput exponent pairs and the A/B process calculus.
//
// A word such as "BA^3B" acts on a start pair rightmost letter first, so
// "AB" means A(B(start)). With the standard processes
//   A(k, l) = (k / (2k + 2), (k + l + 1) / (2k + 2)),
//   B(k, l) = (l - 1/2, k + 1/2),
// "AB" maps (0, 1) to (1/6, 2/3) and "A2B" to (1/14, 11/14).

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ps4/rational.hpp"

namespace ps4 {

class ExponentPair {
 public:
  // Throws DomainError unless 0 <= kappa <= 1/2 <= lambda <= 1.
  ExponentPair(Rational kappa, Rational lambda);

  static ExponentPair trivial() { return {0, 1}; }

  const Rational& kappa() const { return kappa_; }
  const Rational& lambda() const { return lambda_; }

  // "(num/den, num/den)"
  std::string str() const;

  friend bool operator==(const ExponentPair&, const ExponentPair&) = default;

 private:
  Rational kappa_;
  Rational lambda_;
};

ExponentPair apply_A(const ExponentPair& p);
ExponentPair apply_B(const ExponentPair& p);

enum class Process : char { A = 'A', B = 'B' };

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Process> letters) : letters_(std::move(letters)) {}

  // Letters A/B, each optionally followed by a repeat count ("A3" or "A^3").
  // Whitespace is ignored. Throws ParseError with the offending offset.
  static Word parse(std::string_view text);

  const std::vector<Process>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  // Run-length form, e.g. "BA3BA2B". Round-trips through parse().
  std::string str() const;

  // Applies this word, rightmost letter first.
  ExponentPair apply(const ExponentPair& start = ExponentPair::trivial()) const;

  // Word whose action is `p` after this one, i.e. p prepended.
  Word then(Process p) const;

  friend Word operator+(const Word& a, const Word& b);
  friend bool operator==(const Word&, const Word&) = default;

 private:
  std::vector<Process> letters_;
};

inline Word parse_word(std::string_view text) { return Word::parse(text); }
inline ExponentPair eval_word(const Word& w, const ExponentPair& start = ExponentPair::trivial()) {
  return w.apply(start);
}

// (p0 + pk*kappa + pl*lambda) / (q0 + qk*kappa + ql*lambda)
struct LinFrac {
  Rational p0, pk, pl;
  Rational q0 = 1, qk = 0, ql = 0;

  // Throws DomainError naming the pair when the denominator vanishes.
  Rational operator()(const ExponentPair& p) const;

  static LinFrac kappa() { return {0, 1, 0, 1, 0, 0}; }

  // Largest c with kappa*c + lambda - kappa + (5 - c)/2 <= 1 + 3*sigma - c, i.e. the
  // value of c at which the long-word bound on the minor-arc integral stops being
  // dominated by the sigma term. With sigma = 2515/2667 the numerator constant is
  // 3404/889 - 5/2.
  static LinFrac long_word_threshold(const Rational& sigma);
};

enum class Sense { Minimize, Maximize };

enum class Pruning {
  Off,    // deduplication only
  Auto,   // dominance pruning when the objective is provably monotone over the pair box
  Force,  // dominance pruning regardless of the monotonicity check
};

struct SearchResult {
  Word word;
  ExponentPair pair = ExponentPair::trivial();
  Rational value;
  bool pruning_applied = false;
  std::size_t distinct_pairs = 0;  // pairs retained over the whole enumeration
};

// True when obj is nonincreasing (Maximize) or nondecreasing (Minimize) in both
// kappa and lambda on the box [0, 1/2] x [1/2, 1], decided exactly from the signs
// of the affine numerators of the partial derivatives at the box corners.
bool objective_monotone(const LinFrac& obj, Sense sense);

// Optimizes obj over all words of length 1..max_depth applied to (0, 1).
// Ties keep the first word found in breadth-first order (A before B).
SearchResult search_linfrac(const LinFrac& obj, int max_depth, Sense sense, Pruning pruning = Pruning::Auto);

}  // namespace ps4

template <>
struct std::hash<ps4::ExponentPair> {
  std::size_t operator()(const ps4::ExponentPair& p) const noexcept {
    std::size_t h = p.kappa().hash();
    return h ^ (p.lambda().hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  }
};
