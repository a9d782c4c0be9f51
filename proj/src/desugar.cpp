#include <fmt/format.h>

#include <set>

#include "svr/surface.hpp"
#include "util.hpp"

namespace svr {

namespace {

enum class Sort { Lambda, Stack, TermVar, Pred, GlobalValue, GlobalTerm };

struct Bound {
  std::string source;
  Sort sort;
  std::string core;  // name in the core syntax
  int arity = 0;
};

struct DesugarError {};

class Desugarer {
 public:
  Desugarer(ElaboratedModule& out, bool lenient) : out_(out), lenient_(lenient) {
    for (const auto& [g, k] : out_.globals) {
      taken_.insert(g);
      scope_.push_back({g, k == GlobalKind::Value ? Sort::GlobalValue : Sort::GlobalTerm, g});
    }
  }

  void run(const SourceModule& m) {
    for (const auto& d : m.decls) {
      Mark start = mark();
      try {
        std::visit([&](const auto& x) { declare(x); }, d);
      } catch (const DesugarError&) {
        reset(start);
      }
    }
  }

  Term query(const Expr& e) {
    collect_names(e);
    return term(e);
  }

 private:
  // ----- names

  [[noreturn]] void error(const Span& at, std::string msg) {
    out_.diagnostics.push_back({Severity::Error, at, std::move(msg), std::nullopt});
    throw DesugarError{};
  }

  std::string fresh(const std::string& base) {
    std::string stem = base.empty() ? "x" : base;
    std::string n = stem;
    for (int i = 1; taken_.contains(n); ++i) n = stem + std::to_string(i);
    taken_.insert(n);
    return n;
  }

  static int space(Sort s) {
    switch (s) {
      case Sort::Lambda:
      case Sort::GlobalValue: return 0;
      case Sort::TermVar:
      case Sort::GlobalTerm: return 1;
      case Sort::Stack: return 2;
      case Sort::Pred: return 3;
    }
    return 0;
  }

  // Keeps the source name unless it would shadow a name of the same namespace.
  std::string binder(const std::string& source, Sort sort) {
    if (source == "_") return fresh("y");
    for (const auto& b : scope_)
      if (b.core == source && space(b.sort) == space(sort)) return fresh(source);
    taken_.insert(source);
    return source;
  }

  const Bound* lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->source == name) return &*it;
    return nullptr;
  }

  struct Mark {
    std::size_t size;
  };
  Mark mark() const { return {scope_.size()}; }
  void reset(Mark m) { scope_.resize(m.size); }

  void collect_names(const Expr& e) {
    std::visit(overloaded{[&](const EVar& v) { taken_.insert(v.name); },
                          [&](const ECtor& c) {
                            if (c.payload) collect_names(*c.payload);
                          },
                          [&](const ERecord& r) {
                            for (const auto& f : r.fields) collect_names(*f.second);
                          },
                          [&](const EFun& f) {
                            for (const auto& p : f.params) taken_.insert(p);
                            collect_names(*f.body);
                          },
                          [&](const EMu& m) {
                            taken_.insert(m.var);
                            collect_names(*m.body);
                          },
                          [&](const EApp& a) {
                            collect_names(*a.fun);
                            collect_names(*a.arg);
                          },
                          [&](const EProj& p) { collect_names(*p.record); },
                          [&](const EMatch& m) {
                            collect_names(*m.scrutinee);
                            for (const auto& b : m.branches) {
                              taken_.insert(b.var);
                              collect_names(*b.body);
                            }
                          },
                          [&](const ELet& l) {
                            taken_.insert(l.var);
                            collect_names(*l.bound);
                            collect_names(*l.body);
                          },
                          [&](const ERestart& r) {
                            collect_names(*r.term);
                            taken_.insert(r.stack);
                          },
                          [](const EScissors&) {},
                          [&](const EInst& i) {
                            collect_names(*i.term);
                            if (auto* t = std::get_if<ETermWitness>(&i.witness)) collect_names(*t->term);
                          },
                          [&](const ERewrite& r) {
                            collect_names(*r.lhs);
                            collect_names(*r.rhs);
                            collect_names(*r.body);
                          }},
               e.node);
  }

  // ----- declarations

  void declare(const TypeDef& d) {
    if (type_names_.contains(d.name) || out_.types.lookup(d.name)) error(d.span, "type " + d.name + " is already defined");
    type_names_.insert(d.name);
    Formula body;
    try {
      body = type(*d.body);
    } catch (const DesugarError&) {
      type_names_.erase(d.name);
      throw;
    }
    if (auto err = out_.types.define(d.name, body)) {
      type_names_.erase(d.name);
      error(d.span, *err);
    }
    out_.items.push_back(CoreTypeDef{d.name, body, d.span});
  }

  void declare(const LetDef& d) {
    if (out_.globals.contains(d.name)) error(d.span, d.name + " is already defined");
    collect_names(*d.body);
    taken_.insert(d.name);
    for (const auto& p : d.params) taken_.insert(p.name);

    CoreDef def;
    def.name = d.name;
    def.rec = d.rec;
    def.span = d.span;

    Mark m = mark();
    if (d.rec) scope_.push_back({d.name, Sort::GlobalValue, d.name});

    if (d.result) {
      for (const auto& p : d.params)
        if (!p.type) error(p.span, "parameter " + p.name + " needs a type since the result type is given");
      def.goal = telescope(d.params, 0, *d.result);
    } else {
      for (const auto& p : d.params)
        if (p.type) error(p.span, "annotated parameters need a result type");
    }

    std::vector<std::string> params;
    for (const auto& p : d.params) {
      params.push_back(binder(p.name, Sort::Lambda));
      scope_.push_back({p.name, Sort::Lambda, params.back()});
    }
    Term body = term(*d.body);
    reset(m);
    for (auto it = params.rbegin(); it != params.rend(); ++it) body = mk::val(mk::lam(*it, body));
    def.body = body;

    if (d.rec && !is_value(body)) error(d.span, "a recursive definition must be a function");
    def.kind = is_value(body) ? GlobalKind::Value : GlobalKind::Term;
    def.runtime = d.rec ? mk::val(fixpoint(d.name, value_of(body))) : body;
    out_.globals[d.name] = def.kind;
    scope_.insert(scope_.begin(), {d.name, def.kind == GlobalKind::Value ? Sort::GlobalValue : Sort::GlobalTerm, d.name});
    out_.items.push_back(std::move(def));
  }

  // Parameter annotations scope over the rest of the telescope.
  Formula telescope(const std::vector<Param>& ps, std::size_t i, const TypeExpr& result) {
    if (i == ps.size()) return type(result);
    Formula dom = type(*ps[i].type);
    Mark m = mark();
    std::string a = binder(ps[i].name, Sort::TermVar);
    scope_.push_back({ps[i].name, Sort::TermVar, a});
    Formula rest = telescope(ps, i + 1, result);
    reset(m);
    if (rest->fv.terms.term.contains(a)) return sugar_pi(a, dom, rest);
    return fm::arrow(dom, rest);
  }

  void declare(const AssertEquiv& a) {
    collect_names(*a.lhs);
    collect_names(*a.rhs);
    out_.items.push_back(CoreAssert{term(*a.lhs), term(*a.rhs), a.polarity, a.span});
  }

  void declare(const CheckGoal& c) {
    if (!out_.globals.contains(c.name)) error(c.span, "unknown definition " + c.name);
    out_.items.push_back(CoreGoal{c.name, type(*c.goal), c.span});
  }

  // ----- expressions

  Term lam_var(const std::string& x) { return mk::val(mk::var(x)); }

  // Wraps a non-value in (λx k[x]) t.
  template <class K>
  Term through_value(const Term& t, const std::string& hint, K k) {
    if (is_value(t)) return k(value_of(t));
    std::string x = fresh(hint);
    return mk::app(mk::val(mk::lam(x, k(mk::var(x)))), t);
  }

  Term term(const Expr& e) {
    return std::visit(
        overloaded{
            [&](const EVar& v) -> Term {
              const Bound* b = lookup(v.name);
              if (!b) {
                if (lenient_) return lam_var(v.name);
                error(e.span, "unbound name " + v.name);
              }
              switch (b->sort) {
                case Sort::Lambda:
                case Sort::GlobalValue: return lam_var(b->core);
                case Sort::TermVar:
                case Sort::GlobalTerm: return mk::tvar(b->core);
                case Sort::Stack: error(e.span, v.name + " is a stack variable");
                case Sort::Pred: error(e.span, v.name + " is a predicate variable");
              }
              error(e.span, "unbound name " + v.name);
            },
            [&](const ECtor& c) -> Term {
              if (!c.payload) return mk::val(mk::ctor(c.name));
              return through_value(term(*c.payload), "x", [&](const Value& v) { return mk::val(mk::ctor(c.name, v)); });
            },
            [&](const ERecord& r) -> Term {
              std::set<std::string> seen;
              for (const auto& f : r.fields)
                if (!seen.insert(f.first).second) error(e.span, "duplicate field " + f.first);
              std::vector<Term> parts;
              for (const auto& f : r.fields) parts.push_back(term(*f.second));
              return record(r, parts, 0, {});
            },
            [&](const EFun& f) -> Term {
              Mark m = mark();
              std::vector<std::string> xs;
              for (const auto& p : f.params) {
                xs.push_back(binder(p, Sort::Lambda));
                scope_.push_back({p, Sort::Lambda, xs.back()});
              }
              Term body = term(*f.body);
              reset(m);
              for (auto it = xs.rbegin(); it != xs.rend(); ++it) body = mk::val(mk::lam(*it, body));
              return body;
            },
            [&](const EMu& mu) -> Term {
              Mark m = mark();
              std::string a = binder(mu.var, Sort::Stack);
              scope_.push_back({mu.var, Sort::Stack, a});
              Term body = term(*mu.body);
              reset(m);
              return mk::mu(a, body);
            },
            [&](const EApp& a) -> Term {
              Term f = term(*a.fun);
              return mk::app(f, term(*a.arg));
            },
            [&](const EProj& p) -> Term {
              return through_value(term(*p.record), "x", [&](const Value& v) { return mk::proj(v, p.label); });
            },
            [&](const EMatch& mt) -> Term {
              std::map<std::string, const EBranch*> bs;
              for (const auto& b : mt.branches)
                if (!bs.emplace(b.ctor, &b).second) error(b.span, "duplicate branch for " + b.ctor);
              Term scrut = term(*mt.scrutinee);
              return through_value(scrut, "x", [&](const Value& v) {
                std::map<std::string, Branch> branches;
                for (const auto& [c, b] : bs) {
                  Mark m = mark();
                  std::string y = binder(b->var, Sort::Lambda);
                  if (b->var != "_") scope_.push_back({b->var, Sort::Lambda, y});
                  branches.emplace(c, Branch{y, term(*b->body)});
                  reset(m);
                }
                return mk::case_of(v, std::move(branches));
              });
            },
            [&](const ELet& l) -> Term {
              Term bound = term(*l.bound);
              Mark m = mark();
              std::string x = binder(l.var, Sort::Lambda);
              scope_.push_back({l.var, Sort::Lambda, x});
              Term body = term(*l.body);
              reset(m);
              return mk::app(mk::val(mk::lam(x, body)), bound);
            },
            [&](const ERestart& r) -> Term {
              const Bound* b = lookup(r.stack);
              if (!b || b->sort != Sort::Stack) error(e.span, r.stack + " is not a stack variable in scope");
              return mk::proc(term(*r.term), mk::svar(b->core));
            },
            [&](const EScissors&) -> Term { return mk::val(mk::scissors()); },
            [&](const EInst& i) -> Term {
              Term t = term(*i.term);
              Instantiation w = std::visit(
                  overloaded{[&](const ETermWitness& tw) -> Instantiation { return term(*tw.term); },
                             [&](const EPredWitness& pw) -> Instantiation {
                               Mark m = mark();
                               std::vector<std::string> ps;
                               for (const auto& p : pw.params) {
                                 ps.push_back(binder(p, Sort::TermVar));
                                 scope_.push_back({p, Sort::TermVar, ps.back()});
                               }
                               Formula body = type(*pw.body);
                               reset(m);
                               return std::pair{pw.var, PredicateDef{ps, body}};
                             }},
                  i.witness);
              out_.hints.instantiations[t.get()].push_back(std::move(w));
              return t;
            },
            [&](const ERewrite& r) -> Term {
              Term l = term(*r.lhs);
              Term rr = term(*r.rhs);
              Term body = term(*r.body);
              out_.hints.rewrites[body.get()].emplace_back(l, rr);
              return body;
            }},
        e.node);
  }

  // Records evaluate their non-value fields through wrappers, right to left.
  Term record(const ERecord& r, const std::vector<Term>& parts, std::size_t i, std::map<std::string, Value> done) {
    if (i == parts.size()) return mk::val(mk::record(std::move(done)));
    const std::string& label = r.fields[i].first;
    return through_value(parts[i], label, [&](const Value& v) {
      auto d = done;
      d.emplace(label, v);
      return record(r, parts, i + 1, std::move(d));
    });
  }

  // ----- types

  Formula type(const TypeExpr& t) {
    return std::visit(
        overloaded{
            [&](const TName& n) -> Formula {
              const Bound* b = lookup(n.name);
              if (b && b->sort == Sort::Pred) {
                if (static_cast<int>(n.args.size()) != b->arity)
                  error(t.span, fmt::format("{} takes {} argument(s), not {}", n.name, b->arity, n.args.size()));
                std::vector<Term> args;
                for (const auto& a : n.args) args.push_back(term(*a));
                return fm::pred(b->core, std::move(args));
              }
              if (type_names_.contains(n.name)) {
                if (!n.args.empty()) error(t.span, "type " + n.name + " takes no arguments");
                return fm::named(n.name);
              }
              error(t.span, "unknown type " + n.name);
            },
            [&](const TArrow& a) -> Formula {
              Formula d = type(*a.dom);
              return fm::arrow(d, type(*a.cod));
            },
            [&](const TForall& q) -> Formula { return quantifier(q.var, q.arity, *q.body, true); },
            [&](const TExists& q) -> Formula { return quantifier(q.var, q.arity, *q.body, false); },
            [&](const TPi& p) -> Formula {
              Formula dom = type(*p.dom);
              Mark m = mark();
              std::string a = binder(p.var, Sort::TermVar);
              scope_.push_back({p.var, Sort::TermVar, a});
              Formula body = type(*p.body);
              reset(m);
              return sugar_pi(a, dom, body);
            },
            [&](const TRecord& r) -> Formula {
              std::map<std::string, Formula> fields;
              for (const auto& [l, a] : r.fields)
                if (!fields.emplace(l, type(*a)).second) error(t.span, "duplicate field " + l);
              return fm::record(std::move(fields));
            },
            [&](const TVariant& v) -> Formula {
              std::map<std::string, Formula> ctors;
              for (const auto& [c, a] : v.ctors)
                if (!ctors.emplace(c, a ? type(*a) : fm::record({})).second) error(t.span, "duplicate constructor " + c);
              return fm::variant(std::move(ctors));
            },
            [&](const TMember& m) -> Formula {
              Term u = term(*m.term);
              return fm::member(u, type(*m.type));
            },
            [&](const TRestrict& r) -> Formula {
              Formula a = type(*r.type);
              Term l = term(*r.lhs);
              return fm::restrict(a, l, term(*r.rhs));
            },
            [&](const TEquation& q) -> Formula {
              Term l = term(*q.lhs);
              Term r = term(*q.rhs);
              return q.polarity == Polarity::Equiv ? sugar_equation(l, r) : sugar_inequation(l, r);
            },
            [](const TTop&) { return sugar_top(); },
            [](const TBot&) { return sugar_bot(); }},
        t.node);
  }

  Formula quantifier(const std::string& var, int arity, const TypeExpr& body, bool forall) {
    Mark m = mark();
    std::string x = binder(var, arity < 0 ? Sort::TermVar : Sort::Pred);
    scope_.push_back({var, arity < 0 ? Sort::TermVar : Sort::Pred, x, arity});
    Formula b = type(body);
    reset(m);
    if (arity < 0) return forall ? fm::forall(x, b) : fm::exists(x, b);
    return forall ? fm::forall_pred(x, arity, b) : fm::exists_pred(x, arity, b);
  }

  ElaboratedModule& out_;
  bool lenient_;
  std::vector<Bound> scope_;
  std::set<std::string> taken_;
  std::set<std::string> type_names_;
};

}  // namespace

bool ElaboratedModule::ok() const {
  for (const auto& d : diagnostics)
    if (d.severity == Severity::Error) return false;
  return true;
}

ElaboratedModule desugar(const SourceModule& m) {
  ElaboratedModule out;
  Desugarer d(out, false);
  d.run(m);
  return out;
}

std::pair<Term, std::vector<Diagnostic>> desugar_query(const ElaboratedModule& m, const Expr& e) {
  ElaboratedModule scratch;
  scratch.globals = m.globals;
  Desugarer d(scratch, true);
  try {
    return {d.query(e), scratch.diagnostics};
  } catch (const DesugarError&) {
    return {nullptr, scratch.diagnostics};
  }
}

Value fixpoint(const std::string& f, const Value& body) {
  const VarSets& fv = free_vars(body);
  auto pick = [&](std::string n) {
    while (fv.lambda.contains(n) || n == f) n += "'";
    return n;
  };
  std::string w = pick("w");
  std::string z = pick("z");
  // W = λw ((λf V) (λz ((w w) z)))
  Term ww = mk::app(mk::val(mk::var(w)), mk::val(mk::var(w)));
  Value unfold = mk::lam(z, mk::app(ww, mk::val(mk::var(z))));
  Value big_w = mk::lam(w, mk::app(mk::val(mk::lam(f, mk::val(body))), mk::val(unfold)));
  // fix = λz ((W W) z)
  return mk::lam(z, mk::app(mk::app(mk::val(big_w), mk::val(big_w)), mk::val(mk::var(z))));
}

}  // namespace svr
