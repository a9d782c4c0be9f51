#include <fmt/format.h>

#include <cctype>
#include <set>

#include "svr/surface.hpp"
#include "util.hpp"

namespace svr {

namespace {

const std::set<std::string, std::less<>> kKeywords{"type",   "let",    "rec",   "in",     "match", "with",
                                                   "fun",    "mu",     "case",  "rewrite", "assert", "check",
                                                   "forall", "exists", "Pi",    "top",     "bot"};

struct ParseError {};

bool upper(const std::string& s) { return !s.empty() && s[0] >= 'A' && s[0] <= 'Z'; }

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  std::vector<Diagnostic> diags;

  SourceModule module() {
    SourceModule m;
    while (!at(Tok::End)) {
      std::size_t start = pos_;
      try {
        m.decls.push_back(decl());
      } catch (const ParseError&) {
        recover(start);
      }
    }
    return m;
  }

  ExprPtr lone_expression() {
    try {
      ExprPtr e = expr();
      if (!at(Tok::End)) error(peek(), "unexpected " + describe(peek()) + " after the expression");
      return e;
    } catch (const ParseError&) {
      return nullptr;
    }
  }

 private:
  // ----- token helpers

  const Token& peek(std::size_t k = 0) const { return t_[std::min(pos_ + k, t_.size() - 1)]; }
  bool at(Tok k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
  bool at_kw(std::string_view kw, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == kw;
  }
  bool at_ident(std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && !kKeywords.contains(peek(ahead).text);
  }
  const Token& take() {
    const Token& t = t_[pos_];
    if (pos_ + 1 < t_.size()) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    take();
    return true;
  }
  bool accept_kw(std::string_view kw) {
    if (!at_kw(kw)) return false;
    take();
    return true;
  }

  static std::string describe(const Token& t) {
    if (t.kind == Tok::Ident) return kKeywords.contains(t.text) ? "keyword '" + t.text + "'" : "'" + t.text + "'";
    return token_name(t.kind);
  }

  [[noreturn]] void error(const Token& at, const std::string& msg) {
    diags.push_back({Severity::Error, at.span, msg, std::nullopt});
    throw ParseError{};
  }

  const Token& expect(Tok k, std::string_view what) {
    if (!at(k)) error(peek(), fmt::format("expected {} {}, found {}", token_name(k), what, describe(peek())));
    return take();
  }
  void expect_kw(std::string_view kw, std::string_view what) {
    if (!at_kw(kw)) error(peek(), fmt::format("expected '{}' {}, found {}", kw, what, describe(peek())));
    take();
  }
  std::string ident(std::string_view what) {
    if (!at_ident()) error(peek(), fmt::format("expected a name {}, found {}", what, describe(peek())));
    return take().text;
  }

  Span from(const Span& start) const {
    Span s = start;
    const Token& last = t_[pos_ == 0 ? 0 : pos_ - 1];
    s.end = std::max(start.begin, last.span.end);
    return s;
  }

  bool decl_start(std::size_t ahead = 0) const {
    return at_kw("type", ahead) || at_kw("assert", ahead) || at_kw("check", ahead) ||
           (at_kw("let", ahead) && peek(ahead).span.column == 1);
  }

  void recover(std::size_t start) {
    if (pos_ == start) take();
    while (!at(Tok::End) && !decl_start()) take();
  }

  // Runs f speculatively; on failure restores the position and drops diagnostics.
  template <class F>
  auto attempt(F f) -> std::optional<decltype(f())> {
    std::size_t p = pos_;
    std::size_t d = diags.size();
    try {
      return f();
    } catch (const ParseError&) {
      pos_ = p;
      diags.resize(d);
      return std::nullopt;
    }
  }

  // ----- declarations

  Decl decl() {
    Span start = peek().span;
    if (accept_kw("type")) {
      TypeDef d;
      d.name = ident("after 'type'");
      expect(Tok::Eq, "in a type definition");
      d.body = type();
      d.span = from(start);
      return d;
    }
    if (accept_kw("let")) {
      LetDef d;
      d.rec = accept_kw("rec");
      d.name = ident("after 'let'");
      while (at_ident() || at(Tok::LParen)) d.params.push_back(param());
      if (accept(Tok::Colon)) d.result = type();
      expect(Tok::Eq, "before the body of " + d.name);
      d.body = expr();
      d.span = from(start);
      return d;
    }
    if (accept_kw("assert")) {
      AssertEquiv a;
      a.lhs = expr();
      if (accept(Tok::Inequiv)) {
        a.polarity = Polarity::Inequiv;
      } else {
        expect(Tok::Equiv, "in an assertion");
      }
      a.rhs = expr();
      a.span = from(start);
      return a;
    }
    if (accept_kw("check")) {
      CheckGoal c;
      c.name = ident("after 'check'");
      expect(Tok::Colon, "after the checked name");
      c.goal = type();
      c.span = from(start);
      return c;
    }
    error(peek(), "expected a declaration ('type', 'let', 'assert' or 'check'), found " + describe(peek()));
  }

  Param param() {
    Param p;
    p.span = peek().span;
    if (accept(Tok::LParen)) {
      p.name = ident("as a parameter");
      expect(Tok::Colon, "in a parameter annotation");
      p.type = type();
      expect(Tok::RParen, "after a parameter annotation");
    } else {
      p.name = take().text;
      // n:nat binds tightly; a spaced colon starts the result type.
      if (at(Tok::Colon) && !peek().spaced) {
        take();
        p.type = base_type();
      }
    }
    p.span = from(p.span);
    return p;
  }

  // ----- expressions

  template <class T>
  ExprPtr make(T node, const Span& start) {
    return std::make_shared<const Expr>(Expr{std::move(node), from(start)});
  }

  ExprPtr expr() {
    Span start = peek().span;
    if (accept_kw("fun")) {
      EFun f;
      do f.params.push_back(ident("as a parameter")); while (at_ident());
      expect(Tok::To, "after the parameters of fun");
      f.body = expr();
      return make(std::move(f), start);
    }
    if (accept(Tok::Lambda)) {
      EFun f;
      f.params.push_back(ident("after λ"));
      if (!accept(Tok::To)) accept(Tok::Dot);
      f.body = expr();
      return make(std::move(f), start);
    }
    if (accept_kw("mu")) {
      EMu m;
      m.var = ident("after mu");
      expect(Tok::To, "after the stack variable");
      m.body = expr();
      return make(std::move(m), start);
    }
    if (accept(Tok::Mu)) {
      EMu m;
      m.var = ident("after μ");
      if (!accept(Tok::To)) accept(Tok::Dot);
      m.body = expr();
      return make(std::move(m), start);
    }
    if (accept_kw("let")) {
      ELet l;
      if (at_kw("rec")) error(peek(), "local recursive definitions are not supported");
      l.var = ident("after let");
      expect(Tok::Eq, "in a local definition");
      l.bound = expr();
      expect_kw("in", "after a local definition");
      l.body = expr();
      return make(std::move(l), start);
    }
    if (accept_kw("match")) {
      EMatch m;
      m.scrutinee = expr();
      expect_kw("with", "after the matched expression");
      accept(Tok::Bar);
      do m.branches.push_back(branch()); while (accept(Tok::Bar));
      return make(std::move(m), start);
    }
    if (accept_kw("case")) {
      EMatch m;
      m.scrutinee = postfix();
      expect(Tok::LBrack, "before the branches of case");
      if (!at(Tok::RBrack)) {
        do m.branches.push_back(branch()); while (accept(Tok::Bar));
      }
      expect(Tok::RBrack, "after the branches of case");
      return make(std::move(m), start);
    }
    if (accept_kw("rewrite")) {
      ERewrite r;
      r.lhs = application();
      expect(Tok::Equiv, "in a rewrite hint");
      r.rhs = application();
      expect_kw("in", "after a rewrite hint");
      r.body = expr();
      return make(std::move(r), start);
    }
    ExprPtr e = application();
    if (accept(Tok::Star)) {
      ERestart r{e, ident("as the restarted stack")};
      return make(std::move(r), start);
    }
    return e;
  }

  EBranch branch() {
    EBranch b;
    b.span = peek().span;
    if (!at_ident() || !upper(peek().text)) error(peek(), "expected a constructor pattern, found " + describe(peek()));
    b.ctor = take().text;
    expect(Tok::LBrack, "in a constructor pattern");
    b.var = at(Tok::RBrack) ? "_" : ident("in a constructor pattern");
    expect(Tok::RBrack, "to close the pattern");
    expect(Tok::To, "after a pattern");
    b.body = expr();
    b.span = from(b.span);
    return b;
  }

  bool atom_start() const {
    if (at_ident()) return true;
    if (at(Tok::LParen) || at(Tok::Scissors)) return true;
    return at(Tok::LBrace) && peek().spaced;
  }

  ExprPtr application() {
    Span start = peek().span;
    ExprPtr e = postfix();
    while (atom_start()) e = make(EApp{e, postfix()}, start);
    return e;
  }

  ExprPtr postfix() {
    Span start = peek().span;
    ExprPtr e = atom();
    while (true) {
      if (at(Tok::Dot)) {
        const Token& dot = take();
        if (!at_ident()) error(dot, "dangling '.': expected a field label, found " + describe(peek()));
        e = make(EProj{e, take().text}, start);
      } else if (at(Tok::LBrace) && !peek().spaced) {
        take();
        EWitness w = witness();
        expect(Tok::RBrace, "after an instantiation");
        e = make(EInst{e, std::move(w)}, start);
      } else {
        return e;
      }
    }
  }

  EWitness witness() {
    if (at_ident() && at(Tok::Assign, 1)) {
      EPredWitness w;
      w.var = take().text;
      take();
      auto params = attempt([&] {
        std::vector<std::string> ps;
        expect(Tok::LParen, "");
        while (at_ident()) ps.push_back(take().text);
        expect(Tok::Comma, "");
        return ps;
      });
      if (params) {
        w.params = std::move(*params);
        w.body = type();
        expect(Tok::RParen, "after a predicate witness");
      } else {
        w.body = type();
      }
      return w;
    }
    return ETermWitness{expr()};
  }

  ExprPtr atom() {
    Span start = peek().span;
    if (at_ident()) {
      std::string name = take().text;
      if (upper(name) && at(Tok::LBrack) && !peek().spaced) {
        take();
        ECtor c{name, nullptr};
        if (!at(Tok::RBrack)) c.payload = expr();
        expect(Tok::RBrack, "after a constructor argument");
        return make(std::move(c), start);
      }
      return make(EVar{name}, start);
    }
    if (accept(Tok::LParen)) {
      ExprPtr e = expr();
      expect(Tok::RParen, "to close the parenthesis");
      return e;
    }
    if (accept(Tok::Scissors)) return make(EScissors{}, start);
    if (accept(Tok::LBrace)) {
      ERecord r;
      while (!at(Tok::RBrace)) {
        std::string l = ident("as a field label");
        expect(Tok::Eq, "after a field label");
        r.fields.emplace_back(l, expr());
        if (!accept(Tok::Semi)) break;
      }
      expect(Tok::RBrace, "to close the record");
      return make(std::move(r), start);
    }
    error(peek(), "expected an expression, found " + describe(peek()));
  }

  // ----- types

  template <class T>
  TypePtr tmake(T node, const Span& start) {
    return std::make_shared<const TypeExpr>(TypeExpr{std::move(node), from(start)});
  }

  // Binder after ∀ or ∃: a term variable, or a predicate variable with arity.
  // A capitalized name without arity is a predicate variable of arity 0.
  std::pair<std::string, int> binder() {
    std::string v = ident("after a quantifier");
    int arity = std::isupper(static_cast<unsigned char>(v[0])) ? 0 : -1;
    if (at(Tok::Subscript) && !peek().spaced) {
      arity = std::stoi(take().text);
    } else if (at(Tok::Slash)) {
      take();
      arity = std::stoi(expect(Tok::Number, "as a predicate arity").text);
    }
    if (!accept(Tok::Dot)) accept(Tok::Comma);
    return {v, arity};
  }

  TypePtr type() {
    Span start = peek().span;
    if (accept(Tok::Forall) || accept_kw("forall")) {
      auto [v, n] = binder();
      return tmake(TForall{v, n, type()}, start);
    }
    if (accept(Tok::Exists) || accept_kw("exists")) {
      auto [v, n] = binder();
      return tmake(TExists{v, n, type()}, start);
    }
    if (accept(Tok::Pi) || accept_kw("Pi")) {
      TPi p;
      if (accept(Tok::LParen)) {
        p.var = ident("after Π");
        expect(Tok::Colon, "in a dependent product");
        p.dom = type();
        expect(Tok::RParen, "after the domain");
      } else {
        p.var = ident("after Π");
        expect(Tok::Colon, "in a dependent product");
        p.dom = base_type();
      }
      if (!accept(Tok::Dot)) accept(Tok::Comma);
      p.body = type();
      return tmake(std::move(p), start);
    }
    TypePtr a = relation();
    if (accept(Tok::Implies) || accept(Tok::To)) return tmake(TArrow{a, type()}, start);
    return a;
  }

  TypePtr relation() {
    Span start = peek().span;
    auto eq = attempt([&]() -> TypePtr {
      ExprPtr l = expr();
      if (at(Tok::Equiv) || at(Tok::Inequiv)) {
        Polarity pol = take().kind == Tok::Equiv ? Polarity::Equiv : Polarity::Inequiv;
        return tmake(TEquation{l, expr(), pol}, start);
      }
      if (accept(Tok::Member) || accept_kw("in")) return tmake(TMember{l, base_type()}, start);
      error(peek(), "not a relation");
    });
    if (eq) return *eq;
    TypePtr a = base_type();
    while (accept(Tok::Restrict)) {
      ExprPtr l = application();
      expect(Tok::Equiv, "in a restriction");
      a = tmake(TRestrict{a, l, application()}, start);
    }
    return a;
  }

  TypePtr base_type() {
    Span start = peek().span;
    if (accept(Tok::Top) || accept_kw("top")) return tmake(TTop{}, start);
    if (accept(Tok::Bot) || accept_kw("bot")) return tmake(TBot{}, start);
    if (accept(Tok::LParen)) {
      TypePtr a = type();
      expect(Tok::RParen, "to close the parenthesis");
      return a;
    }
    if (accept(Tok::LBrace)) {
      TRecord r;
      while (!at(Tok::RBrace)) {
        std::string l = ident("as a field label");
        expect(Tok::Colon, "after a field label");
        r.fields.emplace_back(l, type());
        if (!accept(Tok::Semi)) break;
      }
      expect(Tok::RBrace, "to close the record type");
      return tmake(std::move(r), start);
    }
    if (accept(Tok::LBrack)) {
      TVariant v;
      while (!at(Tok::RBrack)) {
        if (!at_ident() || !upper(peek().text)) error(peek(), "expected a constructor, found " + describe(peek()));
        std::string c = take().text;
        expect(Tok::Colon, "after a constructor");
        v.ctors.emplace_back(c, type());
        if (!accept(Tok::Bar)) break;
      }
      expect(Tok::RBrack, "to close the variant type");
      return tmake(std::move(v), start);
    }
    if (at_ident() && upper(peek().text) && at(Tok::LBrack, 1) && !peek(1).spaced) {
      TVariant v;
      do {
        if (!at_ident() || !upper(peek().text)) error(peek(), "expected a constructor, found " + describe(peek()));
        std::string c = take().text;
        expect(Tok::LBrack, "after a constructor");
        TypePtr payload = at(Tok::RBrack) ? nullptr : type();
        expect(Tok::RBrack, "after a constructor payload");
        v.ctors.emplace_back(c, payload);
      } while (accept(Tok::Bar));
      return tmake(std::move(v), start);
    }
    if (at_ident()) {
      TName n{take().text, {}};
      if (at(Tok::Subscript) && !peek().spaced) take();
      if (at(Tok::LParen) && !peek().spaced) {
        take();
        do n.args.push_back(expr()); while (accept(Tok::Comma));
        expect(Tok::RParen, "after predicate arguments");
      }
      return tmake(std::move(n), start);
    }
    error(peek(), "expected a type, found " + describe(peek()));
  }

  std::vector<Token> t_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printing

std::string expr_str(const Expr& e, int level);
std::string type_str(const TypeExpr& t, int level);

std::string paren(bool wrap, std::string s) { return wrap ? "(" + s + ")" : s; }

std::string witness_str(const EWitness& w) {
  return std::visit(overloaded{[](const ETermWitness& t) { return expr_str(*t.term, 0); },
                               [](const EPredWitness& p) {
                                 if (p.params.empty()) return p.var + " := " + type_str(*p.body, 0);
                                 std::string ps;
                                 for (const auto& a : p.params) ps += (ps.empty() ? "" : " ") + a;
                                 return fmt::format("{} := ({}, {})", p.var, ps, type_str(*p.body, 0));
                               }},
                    w);
}

bool is_open_ended(const Expr& e) {
  return std::holds_alternative<EFun>(e.node) || std::holds_alternative<EMu>(e.node) ||
         std::holds_alternative<ELet>(e.node) || std::holds_alternative<EMatch>(e.node) ||
         std::holds_alternative<ERewrite>(e.node) || std::holds_alternative<ERestart>(e.node);
}

// 0: binders and match, 1: application, 2: atoms and postfix forms.
std::string expr_str(const Expr& e, int level) {
  return std::visit(
      overloaded{
          [](const EVar& v) { return v.name; },
          [](const ECtor& c) { return c.name + "[" + (c.payload ? expr_str(*c.payload, 0) : "") + "]"; },
          [](const ERecord& r) {
            std::string s = "{";
            for (std::size_t i = 0; i < r.fields.size(); ++i)
              s += (i ? "; " : "") + r.fields[i].first + " = " + expr_str(*r.fields[i].second, 0);
            return s + "}";
          },
          [&](const EFun& f) {
            std::string ps;
            for (const auto& p : f.params) ps += " " + p;
            return paren(level > 0, "fun" + ps + " -> " + expr_str(*f.body, 0));
          },
          [&](const EMu& m) { return paren(level > 0, "mu " + m.var + " -> " + expr_str(*m.body, 0)); },
          [&](const EApp& a) { return paren(level > 1, expr_str(*a.fun, 1) + " " + expr_str(*a.arg, 2)); },
          [](const EProj& p) { return expr_str(*p.record, 2) + "." + p.label; },
          [&](const EMatch& m) {
            std::string s = "match " + expr_str(*m.scrutinee, 0) + " with";
            for (std::size_t i = 0; i < m.branches.size(); ++i) {
              const auto& b = m.branches[i];
              bool last = i + 1 == m.branches.size();
              std::string body = expr_str(*b.body, 0);
              if (!last && is_open_ended(*b.body)) body = "(" + body + ")";
              s += " | " + b.ctor + "[" + (b.var == "_" ? "" : b.var) + "] -> " + body;
            }
            return paren(level > 0, s);
          },
          [&](const ELet& l) {
            return paren(level > 0,
                         "let " + l.var + " = " + expr_str(*l.bound, 0) + " in " + expr_str(*l.body, 0));
          },
          [&](const ERestart& r) { return paren(level > 0, expr_str(*r.term, 1) + " * " + r.stack); },
          [](const EScissors&) { return std::string("✂"); },
          [](const EInst& i) { return expr_str(*i.term, 2) + "{" + witness_str(i.witness) + "}"; },
          [&](const ERewrite& r) {
            return paren(level > 0, "rewrite " + expr_str(*r.lhs, 1) + " == " + expr_str(*r.rhs, 1) + " in " +
                                        expr_str(*r.body, 0));
          }},
      e.node);
}

std::string binder_str(const std::string& v, int arity) {
  return arity < 0 ? v : v + "/" + std::to_string(arity);
}

// 0: binders and arrows, 1: relations, 2: atoms.
std::string type_str(const TypeExpr& t, int level) {
  return std::visit(
      overloaded{
          [](const TName& n) {
            if (n.args.empty()) return n.name;
            std::string s = n.name + "(";
            for (std::size_t i = 0; i < n.args.size(); ++i) s += (i ? ", " : "") + expr_str(*n.args[i], 0);
            return s + ")";
          },
          [&](const TArrow& a) { return paren(level > 0, type_str(*a.dom, 1) + " => " + type_str(*a.cod, 0)); },
          [&](const TForall& q) {
            return paren(level > 0, "forall " + binder_str(q.var, q.arity) + " " + type_str(*q.body, 0));
          },
          [&](const TExists& q) {
            return paren(level > 0, "exists " + binder_str(q.var, q.arity) + " " + type_str(*q.body, 0));
          },
          [&](const TPi& p) {
            return paren(level > 0, "Pi (" + p.var + " : " + type_str(*p.dom, 0) + ") " + type_str(*p.body, 0));
          },
          [](const TRecord& r) {
            std::string s = "{";
            for (std::size_t i = 0; i < r.fields.size(); ++i)
              s += (i ? "; " : "") + r.fields[i].first + " : " + type_str(*r.fields[i].second, 0);
            return s + "}";
          },
          [](const TVariant& v) {
            std::string s = "[";
            for (std::size_t i = 0; i < v.ctors.size(); ++i)
              s += (i ? " | " : "") + v.ctors[i].first + " : " +
                   (v.ctors[i].second ? type_str(*v.ctors[i].second, 0) : "{}");
            return s + "]";
          },
          [&](const TMember& m) {
            return paren(level > 1, expr_str(*m.term, 1) + " in " + type_str(*m.type, 2));
          },
          [&](const TRestrict& r) {
            return paren(level > 1,
                         type_str(*r.type, 2) + " |> " + expr_str(*r.lhs, 1) + " == " + expr_str(*r.rhs, 1));
          },
          [&](const TEquation& q) {
            return paren(level > 1, expr_str(*q.lhs, 1) + (q.polarity == Polarity::Equiv ? " == " : " != ") +
                                        expr_str(*q.rhs, 1));
          },
          [](const TTop&) { return std::string("top"); },
          [](const TBot&) { return std::string("bot"); }},
      t.node);
}

}  // namespace

bool ParseResult::ok() const {
  for (const auto& d : diagnostics)
    if (d.severity == Severity::Error) return false;
  return true;
}

ParseResult parse(std::string_view source) {
  LexResult lx = lex(source);
  ParseResult r;
  r.diagnostics = std::move(lx.diagnostics);
  std::vector<Token> toks;
  for (auto& t : lx.tokens)
    if (t.kind != Tok::Error) toks.push_back(std::move(t));
  Parser p(std::move(toks));
  r.module = p.module();
  r.diagnostics.insert(r.diagnostics.end(), p.diags.begin(), p.diags.end());
  return r;
}

std::pair<ExprPtr, std::vector<Diagnostic>> parse_expression(std::string_view source) {
  LexResult lx = lex(source);
  std::vector<Diagnostic> diags = std::move(lx.diagnostics);
  if (!diags.empty()) return {nullptr, diags};
  Parser p(std::move(lx.tokens));
  ExprPtr e = p.lone_expression();
  diags.insert(diags.end(), p.diags.begin(), p.diags.end());
  if (!diags.empty()) e = nullptr;
  return {e, diags};
}

std::string to_source(const Expr& e) { return expr_str(e, 0); }
std::string to_source(const TypeExpr& t) { return type_str(t, 0); }

std::string to_source(const SourceModule& m) {
  std::string out;
  for (const auto& d : m.decls) {
    out += std::visit(
        overloaded{[](const TypeDef& t) { return "type " + t.name + " = " + type_str(*t.body, 0); },
                   [](const LetDef& l) {
                     std::string s = std::string("let ") + (l.rec ? "rec " : "") + l.name;
                     for (const auto& p : l.params)
                       s += p.type ? " (" + p.name + " : " + type_str(*p.type, 0) + ")" : " " + p.name;
                     if (l.result) s += " : " + type_str(*l.result, 0);
                     return s + " = " + expr_str(*l.body, 0);
                   },
                   [](const AssertEquiv& a) {
                     return "assert " + expr_str(*a.lhs, 0) + (a.polarity == Polarity::Equiv ? " == " : " != ") +
                            expr_str(*a.rhs, 0);
                   },
                   [](const CheckGoal& c) { return "check " + c.name + " : " + type_str(*c.goal, 0); }},
        d);
    out += "\n";
  }
  return out;
}

}  // namespace svr
