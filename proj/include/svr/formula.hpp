#pragma once

// Second-order formulas, typing contexts and named types.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "svr/equivalence.hpp"
#include "svr/syntax.hpp"

namespace svr {

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

struct PredApp {
  std::string var;
  std::vector<Term> args;
};
struct Arrow {
  Formula dom;
  Formula cod;
};
struct ForallTerm {
  std::string var;
  Formula body;
};
struct ExistsTerm {
  std::string var;
  Formula body;
};
struct ForallPred {
  std::string var;
  int arity;
  Formula body;
};
struct ExistsPred {
  std::string var;
  int arity;
  Formula body;
};
struct RecordTy {
  std::map<std::string, Formula> fields;
};
struct VariantTy {
  std::map<std::string, Formula> ctors;
};
struct Member {
  Term term;
  Formula type;
};
struct Restrict {
  Formula type;
  Term lhs;
  Term rhs;
};
struct Named {
  std::string name;
};

struct FormulaFV {
  VarSets terms;
  NameSet preds;
};

struct FormulaNode {
  std::variant<PredApp, Arrow, ForallTerm, ExistsTerm, ForallPred, ExistsPred, RecordTy, VariantTy, Member,
               Restrict, Named>
      node;
  FormulaFV fv;
};

template <class T>
const T* as(const Formula& f) {
  return std::get_if<T>(&f->node);
}

namespace fm {
Formula pred(std::string x, std::vector<Term> args = {});
Formula arrow(Formula a, Formula b);
Formula forall(std::string a, Formula body);
Formula exists(std::string a, Formula body);
Formula forall_pred(std::string x, int arity, Formula body);
Formula exists_pred(std::string x, int arity, Formula body);
Formula record(std::map<std::string, Formula> fields);
Formula variant(std::map<std::string, Formula> ctors);
Formula member(Term t, Formula a);
Formula restrict(Formula a, Term lhs, Term rhs);
Formula named(std::string name);
}  // namespace fm

Formula sugar_bot();
Formula sugar_top();
Formula sugar_equation(Term t, Term u);
Formula sugar_inequation(Term t, Term u);
Formula sugar_pi(std::string a, Formula domain, Formula body);

bool is_bot(const Formula& f);
bool is_top(const Formula& f);
// Matches ∀a (a ∈ A ⇒ B).
struct PiView {
  std::string var;
  Formula domain;
  Formula body;
};
std::optional<PiView> as_pi(const Formula& f);

struct PredicateDef {
  std::vector<std::string> params;
  Formula body;
};

using FormulaBinding = std::variant<LambdaSubst, TermSubst, std::pair<std::string, PredicateDef>>;

class ArityMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Capture-avoiding. Throws ArityMismatch when a predicate is applied to the
// wrong number of arguments.
Formula formula_subst(const Formula& f, const FormulaBinding& b);

// Named types by name. Definitions may refer to each other.
class TypeTable {
 public:
  // Rejects definitions whose unfolding reaches a name without passing a
  // record or variant former.
  std::optional<std::string> define(const std::string& name, Formula body);
  const Formula* lookup(const std::string& name) const;
  bool empty() const { return defs_.empty(); }
  const std::map<std::string, Formula>& all() const { return defs_; }

 private:
  std::map<std::string, Formula> defs_;
};

// One step of unfolding when f is a known named type; f otherwise.
Formula unfold_head(const Formula& f, const TypeTable* table);

bool formula_alpha_eq(const Formula& a, const Formula& b);
// Alpha-equivalence that also unfolds named types on mismatch.
bool formula_equiv(const Formula& a, const Formula& b, const TypeTable* table);

// No arrow anywhere, looking through named types once per name.
bool is_pure(const Formula& f, const TypeTable* table = nullptr);

std::string to_string(const Formula& f);

struct LambdaHyp {
  std::string var;
  Formula type;
};
struct StackHyp {
  std::string var;
  Formula type;
};
struct TermDecl {
  std::string var;
};
struct PredDecl {
  std::string var;
  int arity;
};
struct EquivHyp {
  Term lhs;
  Term rhs;
};
struct InequivHyp {
  Term lhs;
  Term rhs;
};

using ContextEntry = std::variant<LambdaHyp, StackHyp, TermDecl, PredDecl, EquivHyp, InequivHyp>;

struct TypingContext {
  std::vector<ContextEntry> entries;

  TypingContext with(ContextEntry e) const;
  bool declares(const std::string& name) const;
  // Innermost type of a λ-variable or stack variable.
  const Formula* lambda_type(const std::string& x) const;
  const Formula* stack_type(const std::string& alpha) const;
  // Free variables of every entry, including declared names.
  FormulaFV free_vars() const;
  bool has_equation(const Term& t, const Term& u) const;
};

struct Validity {
  bool ok = true;
  std::size_t index = 0;
  std::string diagnostic;
};

Validity context_valid(const TypingContext& g);

EquationalContext restrict_to_equational(const TypingContext& g);

std::string to_string(const ContextEntry& e);
std::string to_string(const TypingContext& g);

}  // namespace svr
