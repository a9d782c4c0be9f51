#pragma once

// Checking of typing judgements against the second-order rules, with
// equational discharge and the semantical value restriction.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "svr/equivalence.hpp"
#include "svr/formula.hpp"

namespace svr {

enum class JudgementKind { Value, Term };

struct Judgement {
  JudgementKind kind = JudgementKind::Term;
  TypingContext context;
  Term subject;
  Formula formula;
};

enum class EvidenceKind { Fresh, Target, Decide, Contradiction, Witness, Rewrite };

struct Evidence {
  EvidenceKind kind;
  // Fresh or target variable, or the variable abstracted by a rewrite.
  std::string var;
  std::optional<Claim> claim;
  std::optional<Verdict> verdict;
  // Term witness, or the template of a subject rewrite.
  std::optional<Term> term;
  std::optional<PredicateDef> pred;
  // Template of a formula rewrite.
  std::optional<Formula> formula;
};

struct Derivation {
  std::string rule;
  Judgement conclusion;
  std::vector<Derivation> premises;
  std::vector<Evidence> evidence;
};

enum class FailureReason {
  RuleMismatch,
  FreshnessViolation,
  EquivalenceUnknown,
  EquivalenceRefuted,
  ContextInvalid,
  AnnotationNeeded,
};

struct CheckFailure {
  Judgement judgement;
  FailureReason reason = FailureReason::RuleMismatch;
  std::string message;
  std::optional<Claim> claim;
  std::shared_ptr<CheckFailure> cause;
};

std::string reason_name(FailureReason r);
// Failure and its causes, innermost last.
std::string describe(const CheckFailure& f);

struct CheckResult {
  std::optional<Derivation> derivation;
  std::optional<CheckFailure> failure;

  bool ok() const { return derivation.has_value(); }
};

using Instantiation = std::variant<Term, std::pair<std::string, PredicateDef>>;

// Surface annotations, keyed by the node they decorate.
struct Hints {
  // `t{u}`: witnesses for ∀ eliminations and ∃ introductions on t, in order.
  std::map<const TermNode*, std::vector<Instantiation>> instantiations;
  // `rewrite u₁ ≡ u₂ in t`.
  std::map<const TermNode*, std::vector<std::pair<Term, Term>>> rewrites;
};

struct CheckOptions {
  const TypeTable* types = nullptr;
  const Hints* hints = nullptr;
  // Declared types of term definitions, used when a type must be synthesized.
  const std::map<std::string, Formula>* term_types = nullptr;
  Budget budget;
};

CheckResult check_value(const TypingContext& g, const Value& v, const Formula& a, const CheckOptions& opts);
CheckResult check_term(const TypingContext& g, const Term& t, const Formula& a, const CheckOptions& opts);

struct Restriction {
  Value value;
  Verdict verdict;
};

// A value provably equivalent to u under the equations of g.
std::optional<Restriction> apply_semantical_restriction(const TypingContext& g, const Term& u, const Budget& budget);

// Builds the derived rule for applying t : Π a:A B to a non-value u
// equivalent to v. d_fun must conclude g, u ≡ v ⊢ t : Π a:A B and d_arg
// g, u ≡ v ⊩ v : A[a := u].
Derivation pi_elim_macro(const TypingContext& g, const Term& u, const Restriction& r, Derivation d_fun,
                         Derivation d_arg, const CheckOptions& opts);

// Replays every node against its rule schema. Returns the first violation.
std::optional<std::string> validate_explain(const Derivation& d, const CheckOptions& opts);
bool validate(const Derivation& d, const CheckOptions& opts);

std::size_t derivation_size(const Derivation& d);
// Rule tags in pre-order.
std::vector<std::string> rule_tags(const Derivation& d);
std::string to_string(const Judgement& j);

}  // namespace svr
