#pragma once

// Observational equivalence: an equational decision procedure and a bounded
// counterexample search.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "svr/machine.hpp"
#include "svr/syntax.hpp"

namespace svr {

struct Budget {
  std::size_t fuel = 100000;
  int depth = 3;
  int subst_size = 3;
  int delta_index = 2;
};

enum class Polarity { Equiv, Inequiv };

struct Claim {
  Term lhs;
  Term rhs;
  Polarity polarity = Polarity::Equiv;
};

using EquationalContext = std::vector<Claim>;

struct RewriteStep {
  std::string position;
  std::string axiom;
  Term before;
  Term after;
};

struct Clash {
  std::string kind;
  Term lhs;
  Term rhs;
};

struct Certificate {
  std::vector<RewriteStep> chain;
  std::optional<Clash> clash;
  // Short account of how the contradiction was reached.
  std::string summary;
};

enum class VerdictKind { Proved, Refuted, Unknown };

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  Certificate certificate;
};

std::string verdict_name(VerdictKind k);
std::string polarity_symbol(Polarity p);

struct Normalized {
  Term term;
  std::vector<RewriteStep> steps;
  bool out_of_fuel = false;
};

// Value-beta, projection on literal records and case on literal constructors,
// leftmost-innermost, under binders too.
Term normalize(const Term& t, std::size_t fuel);
Normalized normalize_traced(const Term& t, std::size_t fuel);

Verdict decide(const EquationalContext& e, const Term& lhs, const Term& rhs, Polarity polarity,
               const Budget& budget);
Verdict context_contradictory(const EquationalContext& e, const Budget& budget);

// Rewrites t with the oriented equations of e. Empty when e clashes outright.
std::optional<Term> normalize_in_context(const EquationalContext& e, const Term& t, const Budget& budget);

// Returns a clash kind when the two values are distinguishable by their heads.
std::optional<std::string> value_clash(const Value& v, const Value& w);

struct Witness {
  Stack context;
  std::vector<std::pair<std::string, Term>> substitution;
  std::vector<TraceEntry> left_trace;
  std::vector<TraceEntry> right_trace;
  bool left_converges = false;
  // The non-converging side reached a stuck state or ✂ rather than running out of fuel.
  bool sound = false;
};

struct ProbeAlphabet {
  std::vector<Value> push_values;
  // Probe functions used as frames; the Ω-free ones come first.
  std::vector<Term> probes;
  std::vector<Value> closed_values;
};

ProbeAlphabet probe_alphabet(const Term& lhs, const Term& rhs, const Budget& budget);
std::vector<Stack> stack_contexts(const ProbeAlphabet& a, int depth, const std::string& bottom);

std::optional<Witness> search_inequivalence(const Term& lhs, const Term& rhs, const Budget& budget);

// Fires δ(v, w) when a search at a strictly smaller index finds a sound witness.
class SearchOracle : public EquivOracle {
 public:
  SearchOracle(Budget budget, int index);
  OracleAnswer query(const Value& v, const Value& w) const override;

 private:
  Budget budget_;
  int index_;
  mutable std::map<std::string, OracleAnswer> cache_;
};

Term omega();

}  // namespace svr
