#pragma once

// Values, terms, stacks and processes of the call-by-value lambda-mu calculus.
// Nodes are immutable and shared; every node caches its free variables.

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "svr/names.hpp"

namespace svr {

struct VarSets {
  NameSet lambda;
  NameSet mu;
  NameSet term;

  bool closed() const { return lambda.empty() && mu.empty() && term.empty(); }
  void merge(const VarSets& o) {
    lambda.merge(o.lambda);
    mu.merge(o.mu);
    term.merge(o.term);
  }
  bool operator==(const VarSets&) const = default;
};

struct ValueNode;
struct TermNode;
struct StackNode;
using Value = std::shared_ptr<const ValueNode>;
using Term = std::shared_ptr<const TermNode>;
using Stack = std::shared_ptr<const StackNode>;

struct Process {
  Term term;
  Stack stack;
};

// Value alternatives.
struct LambdaVar {
  std::string name;
};
struct Lambda {
  std::string param;
  Term body;
};
struct Ctor {
  std::string name;
  Value payload;
};
struct Record {
  std::map<std::string, Value> fields;
};
struct Scissors {};

struct ValueNode {
  std::variant<LambdaVar, Lambda, Ctor, Record, Scissors> node;
  VarSets fv;
};

// Term alternatives.
struct Val {
  Value value;
};
struct TermVar {
  std::string name;
};
struct App {
  Term fun;
  Term arg;
};
struct Mu {
  std::string var;
  Term body;
};
struct Proc {
  Process process;
};
struct Proj {
  Value record;
  std::string label;
};
struct Branch {
  std::string var;
  Term body;
};
struct Case {
  Value scrutinee;
  std::map<std::string, Branch> branches;
};
struct Delta {
  Value left;
  Value right;
};
// unit(v) steps to {} when v is {}; internal only.
struct UnitProbe {
  Value arg;
};

struct TermNode {
  std::variant<Val, TermVar, App, Mu, Proc, Proj, Case, Delta, UnitProbe> node;
  VarSets fv;
};

// Stack alternatives.
struct StackVar {
  std::string name;
};
struct Push {
  Value head;
  Stack tail;
};
struct Frame {
  Term fun;
  Stack tail;
};

struct StackNode {
  std::variant<StackVar, Push, Frame> node;
  VarSets fv;
};

namespace mk {
Value var(std::string x);
Value lam(std::string x, Term body);
Value ctor(std::string c, Value payload);
Value ctor(std::string c);  // C[{}]
Value record(std::map<std::string, Value> fields);
Value unit();  // {}
Value scissors();

Term val(Value v);
Term tvar(std::string a);
Term app(Term f, Term u);
Term apps(Term f, std::vector<Term> args);
Term mu(std::string alpha, Term body);
Term proc(Term t, Stack s);
Term proj(Value v, std::string label);
Term case_of(Value v, std::map<std::string, Branch> branches);
Term delta(Value v, Value w);
Term unit_probe(Value v);

Stack svar(std::string alpha);
Stack push(Value v, Stack tail);
Stack frame(Term t, Stack tail);
}  // namespace mk

template <class T>
const T* as(const Value& v) {
  return std::get_if<T>(&v->node);
}
template <class T>
const T* as(const Term& t) {
  return std::get_if<T>(&t->node);
}
template <class T>
const T* as(const Stack& s) {
  return std::get_if<T>(&s->node);
}

inline bool is_value(const Term& t) { return as<Val>(t) != nullptr; }
inline const Value& value_of(const Term& t) { return std::get<Val>(t->node).value; }
bool is_empty_record(const Value& v);

const VarSets& free_vars(const Value& v);
const VarSets& free_vars(const Term& t);
const VarSets& free_vars(const Stack& s);
VarSets free_vars(const Process& p);

// Innermost stack variable of a stack.
const std::string& stack_bottom(const Stack& s);

struct LambdaSubst {
  std::string var;
  Value value;
};
struct StackSubst {
  std::string var;
  Stack stack;
};
struct TermSubst {
  std::string var;
  Term term;
};
using Binding = std::variant<LambdaSubst, StackSubst, TermSubst>;

Value subst(const Value& v, const Binding& b);
Term subst(const Term& t, const Binding& b);
Stack subst(const Stack& s, const Binding& b);
Process subst(const Process& p, const Binding& b);

// Renaming maps for bound variables. Pairs are pushed when entering binders.
struct AlphaEnv {
  std::vector<std::pair<std::string, std::string>> lambda;
  std::vector<std::pair<std::string, std::string>> mu;
  std::vector<std::pair<std::string, std::string>> term;
};

bool alpha_eq(const Value& a, const Value& b);
bool alpha_eq(const Term& a, const Term& b);
bool alpha_eq(const Stack& a, const Stack& b);
bool alpha_eq(const Process& a, const Process& b);
bool alpha_eq(const Term& a, const Term& b, AlphaEnv& env);
bool alpha_eq(const Value& a, const Value& b, AlphaEnv& env);
bool alpha_eq(const Stack& a, const Stack& b, AlphaEnv& env);
// Compares variable names under the renaming pairs (innermost first).
bool alpha_var_eq(const std::vector<std::pair<std::string, std::string>>& pairs,
                  const std::string& x, const std::string& y);

// A string equal for two terms iff they are alpha-equivalent.
std::string canonical_key(const Term& t);
std::string canonical_key(const Value& v);

std::size_t size(const Value& v);
std::size_t size(const Term& t);
std::size_t size(const Stack& s);
std::size_t size(const Process& p);

// True when no Delta or UnitProbe occurs.
bool delta_free(const Term& t);
bool delta_free(const Value& v);
bool delta_free(const Stack& s);

// Printing precedence: Top admits binders and processes, AppFun admits
// applications, Atom needs parentheses for anything compound.
enum class Prec { Top, AppFun, Atom };

std::string to_string(const Value& v);
std::string to_string(const Term& t);
std::string to_string(const Term& t, Prec p);
std::string to_string(const Stack& s);
std::string to_string(const Process& p);

}  // namespace svr
