#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "svr/equivalence.hpp"

namespace svr {

// Oriented hypotheses used while deciding a claim.
struct RuleSet {
  std::map<std::string, Value> lambda_rules;
  std::map<std::string, Term> term_rules;
  // Recursive definitions, unfolded only at applications to values.
  std::map<std::string, Value> recursive;
  // canonical key of a non-value left-hand side -> (lhs, rhs)
  std::map<std::string, std::pair<Term, Value>> whole;
  // Every variable mentioned by some rule.
  VarSets vars;

  bool empty() const {
    return lambda_rules.empty() && term_rules.empty() && recursive.empty() && whole.empty();
  }
  void recompute_vars();
};

class Rewriter {
 public:
  Rewriter(const RuleSet* rules, std::size_t* fuel, std::vector<RewriteStep>* log);

  Term term(const Term& t);
  Value value(const Value& v);
  Stack stack(const Stack& s);

 private:
  Term children(const Term& t);
  std::optional<std::pair<Term, std::string>> top(const Term& t);
  std::optional<Term> unfold(const Term& t);
  std::pair<std::string, Term> rename_lambda(const std::string& x, const Term& body);
  bool spend();
  void record(const std::string& axiom, const Term& before, const Term& after);
  std::string position() const;

  const RuleSet* rules_;
  std::size_t* fuel_;
  std::vector<RewriteStep>* log_;
  std::vector<std::string> path_;
  // Nesting of term(); unfolding under binders could otherwise recurse forever.
  int depth_ = 0;
};

constexpr std::size_t kMaxLoggedSteps = 4000;
constexpr int kMaxRewriteDepth = 400;

}  // namespace svr
