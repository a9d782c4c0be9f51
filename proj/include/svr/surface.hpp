#pragma once

// The OCaml-like source language: lexer, parser, desugaring to core terms and
// formulas, and the named-type table.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "svr/checker.hpp"
#include "svr/formula.hpp"
#include "svr/syntax.hpp"

namespace svr {

struct Span {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t begin = 0;
  std::size_t end = 0;
};

enum class Severity { Error, Warning, Note };

struct Diagnostic {
  Severity severity = Severity::Error;
  Span span;
  std::string message;
  std::optional<Span> related;
};

std::string severity_name(Severity s);
// "file:line:col: error: message"
std::string format_diagnostic(const Diagnostic& d, std::string_view file);

// ---------------------------------------------------------------------------
// Tokens

enum class Tok {
  Ident,
  Number,
  Subscript,
  LParen,
  RParen,
  LBrack,
  RBrack,
  LBrace,
  RBrace,
  Semi,
  Comma,
  Colon,
  Eq,       // =
  Bar,      // |
  Dot,      // .
  Slash,    // /
  Star,     // ∗ or *
  Scissors, // ✂, %% or \scissors
  Equiv,    // ≡ or ==
  Inequiv,  // ≢ or !=
  Member,   // ∈
  Restrict, // ↾ or |>
  Implies,  // ⇒ or =>
  To,       // → or ->
  Forall,   // ∀
  Exists,   // ∃
  Pi,       // Π
  Lambda,   // λ
  Mu,       // μ
  Top,      // ⊤
  Bot,      // ⊥
  Assign,   // :=
  End,
  Error,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Span span;
  // Whitespace or a comment separates this token from the previous one.
  bool spaced = true;
};

struct LexResult {
  std::vector<Token> tokens;
  std::vector<Diagnostic> diagnostics;
};

LexResult lex(std::string_view source);
std::string token_name(Tok k);

// ---------------------------------------------------------------------------
// Surface syntax

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;
struct TypeExpr;
using TypePtr = std::shared_ptr<const TypeExpr>;

struct ETermWitness {
  ExprPtr term;
};
// X := (a₁ … aₙ, B)
struct EPredWitness {
  std::string var;
  std::vector<std::string> params;
  TypePtr body;
};
using EWitness = std::variant<ETermWitness, EPredWitness>;

struct EVar {
  std::string name;
};
struct ECtor {
  std::string name;
  ExprPtr payload;  // null for C[]
};
struct ERecord {
  std::vector<std::pair<std::string, ExprPtr>> fields;
};
struct EFun {
  std::vector<std::string> params;
  ExprPtr body;
};
struct EMu {
  std::string var;
  ExprPtr body;
};
struct EApp {
  ExprPtr fun;
  ExprPtr arg;
};
struct EProj {
  ExprPtr record;
  std::string label;
};
struct EBranch {
  std::string ctor;
  std::string var;  // "_" for C[]
  ExprPtr body;
  Span span;
};
struct EMatch {
  ExprPtr scrutinee;
  std::vector<EBranch> branches;
};
struct ELet {
  std::string var;
  ExprPtr bound;
  ExprPtr body;
};
// e ∗ α
struct ERestart {
  ExprPtr term;
  std::string stack;
};
struct EScissors {};
struct EInst {
  ExprPtr term;
  EWitness witness;
};
struct ERewrite {
  ExprPtr lhs;
  ExprPtr rhs;
  ExprPtr body;
};

struct Expr {
  std::variant<EVar, ECtor, ERecord, EFun, EMu, EApp, EProj, EMatch, ELet, ERestart, EScissors, EInst, ERewrite> node;
  Span span;
};

// A name, possibly applied: a named type or a predicate variable.
struct TName {
  std::string name;
  std::vector<ExprPtr> args;
};
struct TArrow {
  TypePtr dom;
  TypePtr cod;
};
// arity < 0 binds a term variable.
struct TForall {
  std::string var;
  int arity;
  TypePtr body;
};
struct TExists {
  std::string var;
  int arity;
  TypePtr body;
};
struct TPi {
  std::string var;
  TypePtr dom;
  TypePtr body;
};
struct TRecord {
  std::vector<std::pair<std::string, TypePtr>> fields;
};
struct TVariant {
  std::vector<std::pair<std::string, TypePtr>> ctors;  // null payload means {}
};
struct TMember {
  ExprPtr term;
  TypePtr type;
};
struct TRestrict {
  TypePtr type;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct TEquation {
  ExprPtr lhs;
  ExprPtr rhs;
  Polarity polarity;
};
struct TTop {};
struct TBot {};

struct TypeExpr {
  std::variant<TName, TArrow, TForall, TExists, TPi, TRecord, TVariant, TMember, TRestrict, TEquation, TTop, TBot>
      node;
  Span span;
};

struct Param {
  std::string name;
  TypePtr type;  // may be null
  Span span;
};

struct TypeDef {
  std::string name;
  TypePtr body;
  Span span;
};
struct LetDef {
  std::string name;
  bool rec = false;
  std::vector<Param> params;
  TypePtr result;  // may be null
  ExprPtr body;
  Span span;
};
struct AssertEquiv {
  ExprPtr lhs;
  ExprPtr rhs;
  Polarity polarity = Polarity::Equiv;
  Span span;
};
struct CheckGoal {
  std::string name;
  TypePtr goal;
  Span span;
};

using Decl = std::variant<TypeDef, LetDef, AssertEquiv, CheckGoal>;

struct SourceModule {
  std::vector<Decl> decls;
};

struct ParseResult {
  SourceModule module;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;
};

ParseResult parse(std::string_view source);
// A single expression, for command-line queries.
std::pair<ExprPtr, std::vector<Diagnostic>> parse_expression(std::string_view source);

// Surface printing, re-parsable by parse.
std::string to_source(const Expr& e);
std::string to_source(const TypeExpr& t);
std::string to_source(const SourceModule& m);

// ---------------------------------------------------------------------------
// Desugaring

// How a top-level name is bound in the core: values become λ-variables,
// other terms become term variables.
enum class GlobalKind { Value, Term };

struct CoreTypeDef {
  std::string name;
  Formula body;
  Span span;
};

struct CoreDef {
  std::string name;
  bool rec = false;
  GlobalKind kind = GlobalKind::Value;
  // The definition as written, with the name free when recursive.
  Term body;
  // What the name stands for at run time: a fixpoint when recursive.
  Term runtime;
  std::optional<Formula> goal;
  Span span;
};

struct CoreAssert {
  Term lhs;
  Term rhs;
  Polarity polarity = Polarity::Equiv;
  Span span;
};

struct CoreGoal {
  std::string name;
  Formula goal;
  Span span;
};

using CoreItem = std::variant<CoreTypeDef, CoreDef, CoreAssert, CoreGoal>;

struct ElaboratedModule {
  TypeTable types;
  Hints hints;
  std::vector<CoreItem> items;
  std::map<std::string, GlobalKind> globals;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;
};

ElaboratedModule desugar(const SourceModule& m);

// Desugars an expression in the scope of an elaborated module. Unbound names
// become free λ-variables.
std::pair<Term, std::vector<Diagnostic>> desugar_query(const ElaboratedModule& m, const Expr& e);

// Call-by-value fixpoint: a value F with F v ≻* body[f := F] v.
Value fixpoint(const std::string& f, const Value& body);

}  // namespace svr
