#pragma once

// Exhaustive enumeration and seeded random generation of syntax over a small
// alphabet: constructors A and B, labels l and k.

#include <random>
#include <string>
#include <vector>

#include "svr/syntax.hpp"

namespace svrtest {

using svr::Process;
using svr::Stack;
using svr::Term;
using svr::Value;

inline const std::vector<std::string> kCtors{"A", "B"};
inline const std::vector<std::string> kLabels{"l", "k"};

// Every value, term and stack of an exact size, memoized by size. Free
// variables come from x (λ), α (stack) and a (term); δ and unit probes are
// included when `internal` is set.
class Enumerator {
 public:
  explicit Enumerator(bool internal = true) : internal_(internal) {}

  const std::vector<Value>& values(int n);
  const std::vector<Term>& terms(int n);
  const std::vector<Stack>& stacks(int n);
  // All processes t ∗ π with size(t) + size(π) ≤ max_size.
  std::vector<Process> processes(int max_size);

 private:
  void grow(int n);

  bool internal_;
  std::vector<std::vector<Value>> values_;
  std::vector<std::vector<Term>> terms_;
  std::vector<std::vector<Stack>> stacks_;
};

class Random {
 public:
  explicit Random(unsigned seed) : rng_(seed) {}

  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  bool chance(int percent) { return below(100) < percent; }
  const std::string& ctor() { return kCtors[below(2)]; }
  const std::string& label() { return kLabels[below(2)]; }

  // Values whose free λ-variables are among `vars`.
  Value value(int depth, const std::vector<std::string>& vars = {});
  Value closed_value(int depth) { return value(depth); }
  // First-order data only: constructors and records over {}.
  Value data(int depth);
  Term term(int depth, const std::vector<std::string>& vars = {}, const std::vector<std::string>& stacks = {});
  Stack stack(int depth, const std::vector<std::string>& vars = {}, const std::string& bottom = "α");
  // A closed δ-free process that can take a step.
  Process reducible_process(int depth);
  // A closed term, plus with some probability a perturbed or expanded copy.
  std::pair<Term, Term> term_pair(int depth);

  std::mt19937& engine() { return rng_; }

 private:
  std::string fresh_var(const std::vector<std::string>& vars);
  std::mt19937 rng_;
};

}  // namespace svrtest
