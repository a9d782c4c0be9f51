#include <set>

#include <fmt/format.h>

#include "svr/formula.hpp"
#include "util.hpp"

namespace svr {

namespace {

Formula make(decltype(FormulaNode::node) n, FormulaFV fv) {
  return std::make_shared<const FormulaNode>(FormulaNode{std::move(n), std::move(fv)});
}

void add_fv(FormulaFV& fv, const Formula& f) {
  fv.terms.merge(f->fv.terms);
  fv.preds.merge(f->fv.preds);
}

}  // namespace

namespace fm {

Formula pred(std::string x, std::vector<Term> args) {
  FormulaFV fv;
  fv.preds.insert(x);
  for (const auto& t : args) fv.terms.merge(t->fv);
  return make(PredApp{std::move(x), std::move(args)}, std::move(fv));
}

Formula arrow(Formula a, Formula b) {
  FormulaFV fv;
  add_fv(fv, a);
  add_fv(fv, b);
  return make(Arrow{std::move(a), std::move(b)}, std::move(fv));
}

Formula forall(std::string a, Formula body) {
  FormulaFV fv = body->fv;
  fv.terms.term.erase(a);
  return make(ForallTerm{std::move(a), std::move(body)}, std::move(fv));
}

Formula exists(std::string a, Formula body) {
  FormulaFV fv = body->fv;
  fv.terms.term.erase(a);
  return make(ExistsTerm{std::move(a), std::move(body)}, std::move(fv));
}

Formula forall_pred(std::string x, int arity, Formula body) {
  FormulaFV fv = body->fv;
  fv.preds.erase(x);
  return make(ForallPred{std::move(x), arity, std::move(body)}, std::move(fv));
}

Formula exists_pred(std::string x, int arity, Formula body) {
  FormulaFV fv = body->fv;
  fv.preds.erase(x);
  return make(ExistsPred{std::move(x), arity, std::move(body)}, std::move(fv));
}

Formula record(std::map<std::string, Formula> fields) {
  FormulaFV fv;
  for (const auto& [l, a] : fields) add_fv(fv, a);
  return make(RecordTy{std::move(fields)}, std::move(fv));
}

Formula variant(std::map<std::string, Formula> ctors) {
  FormulaFV fv;
  for (const auto& [c, a] : ctors) add_fv(fv, a);
  return make(VariantTy{std::move(ctors)}, std::move(fv));
}

Formula member(Term t, Formula a) {
  FormulaFV fv = a->fv;
  fv.terms.merge(t->fv);
  return make(Member{std::move(t), std::move(a)}, std::move(fv));
}

Formula restrict(Formula a, Term lhs, Term rhs) {
  FormulaFV fv = a->fv;
  fv.terms.merge(lhs->fv);
  fv.terms.merge(rhs->fv);
  return make(Restrict{std::move(a), std::move(lhs), std::move(rhs)}, std::move(fv));
}

Formula named(std::string name) { return make(Named{std::move(name)}, FormulaFV{}); }

}  // namespace fm

Formula sugar_bot() { return fm::forall_pred("X", 0, fm::pred("X")); }
Formula sugar_top() { return fm::exists_pred("X", 0, fm::pred("X")); }
Formula sugar_equation(Term t, Term u) { return fm::restrict(sugar_top(), std::move(t), std::move(u)); }
Formula sugar_inequation(Term t, Term u) { return fm::arrow(sugar_equation(std::move(t), std::move(u)), sugar_bot()); }
Formula sugar_pi(std::string a, Formula domain, Formula body) {
  Term av = mk::tvar(a);
  return fm::forall(std::move(a), fm::arrow(fm::member(av, std::move(domain)), std::move(body)));
}

namespace {

bool is_self_app(const std::string& x, int arity, const Formula& body) {
  auto* p = as<PredApp>(body);
  return arity == 0 && p && p->var == x && p->args.empty();
}

}  // namespace

bool is_bot(const Formula& f) {
  auto* q = as<ForallPred>(f);
  return q && is_self_app(q->var, q->arity, q->body);
}

bool is_top(const Formula& f) {
  auto* q = as<ExistsPred>(f);
  return q && is_self_app(q->var, q->arity, q->body);
}

std::optional<PiView> as_pi(const Formula& f) {
  auto* q = as<ForallTerm>(f);
  if (!q) return std::nullopt;
  auto* a = as<Arrow>(q->body);
  if (!a) return std::nullopt;
  auto* m = as<Member>(a->dom);
  if (!m) return std::nullopt;
  auto* v = as<TermVar>(m->term);
  if (!v || v->name != q->var) return std::nullopt;
  return PiView{q->var, m->type, a->cod};
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

class FormulaSubst {
 public:
  explicit FormulaSubst(const FormulaBinding& b) : b_(b) {
    std::visit(overloaded{[&](const LambdaSubst& s) { range_.terms = s.value->fv; },
                          [&](const TermSubst& s) { range_.terms = s.term->fv; },
                          [&](const std::pair<std::string, PredicateDef>& s) {
                            range_ = s.second.body->fv;
                            for (const auto& p : s.second.params) range_.terms.term.erase(p);
                          }},
               b_);
  }

  Formula go(const Formula& f) {
    if (!touches(f)) return f;
    return std::visit(
        overloaded{
            [&](const PredApp& p) -> Formula {
              std::vector<Term> args;
              for (const auto& t : p.args) args.push_back(term(t));
              if (auto* s = std::get_if<std::pair<std::string, PredicateDef>>(&b_); s && s->first == p.var)
                return instantiate(s->second, args);
              return fm::pred(p.var, std::move(args));
            },
            [&](const Arrow& a) -> Formula { return fm::arrow(go(a.dom), go(a.cod)); },
            [&](const ForallTerm& q) -> Formula {
              auto [x, body] = term_binder(q.var, q.body);
              return fm::forall(x, body);
            },
            [&](const ExistsTerm& q) -> Formula {
              auto [x, body] = term_binder(q.var, q.body);
              return fm::exists(x, body);
            },
            [&](const ForallPred& q) -> Formula {
              auto [x, body] = pred_binder(q.var, q.arity, q.body);
              return fm::forall_pred(x, q.arity, body);
            },
            [&](const ExistsPred& q) -> Formula {
              auto [x, body] = pred_binder(q.var, q.arity, q.body);
              return fm::exists_pred(x, q.arity, body);
            },
            [&](const RecordTy& r) -> Formula {
              std::map<std::string, Formula> m;
              for (const auto& [l, a] : r.fields) m.emplace(l, go(a));
              return fm::record(std::move(m));
            },
            [&](const VariantTy& v) -> Formula {
              std::map<std::string, Formula> m;
              for (const auto& [c, a] : v.ctors) m.emplace(c, go(a));
              return fm::variant(std::move(m));
            },
            [&](const Member& m) -> Formula { return fm::member(term(m.term), go(m.type)); },
            [&](const Restrict& r) -> Formula { return fm::restrict(go(r.type), term(r.lhs), term(r.rhs)); },
            [&](const Named&) -> Formula { return f; }},
        f->node);
  }

 private:
  bool touches(const Formula& f) const {
    return std::visit(overloaded{[&](const LambdaSubst& s) { return f->fv.terms.lambda.contains(s.var); },
                                 [&](const TermSubst& s) { return f->fv.terms.term.contains(s.var); },
                                 [&](const std::pair<std::string, PredicateDef>& s) {
                                   return f->fv.preds.contains(s.first);
                                 }},
                      b_);
  }

  Term term(const Term& t) {
    return std::visit(overloaded{[&](const LambdaSubst& s) { return subst(t, Binding{s}); },
                                 [&](const TermSubst& s) { return subst(t, Binding{s}); },
                                 [&](const std::pair<std::string, PredicateDef>&) { return t; }},
                      b_);
  }

  Formula instantiate(const PredicateDef& def, const std::vector<Term>& args) {
    auto& name = std::get<std::pair<std::string, PredicateDef>>(b_).first;
    if (def.params.size() != args.size())
      throw ArityMismatch(fmt::format("predicate {} expects {} argument(s), got {}", name, def.params.size(),
                                      args.size()));
    // Rename parameters apart first so that the substitution is simultaneous.
    Formula body = def.body;
    std::vector<std::string> fresh;
    for (const auto& p : def.params) {
      std::string q = fresh_name(p);
      body = formula_subst(body, TermSubst{p, mk::tvar(q)});
      fresh.push_back(q);
    }
    for (std::size_t i = 0; i < args.size(); ++i) body = formula_subst(body, TermSubst{fresh[i], args[i]});
    return body;
  }

  std::pair<std::string, Formula> term_binder(const std::string& a, const Formula& body) {
    if (auto* s = std::get_if<TermSubst>(&b_); s && s->var == a) return {a, body};
    if (!range_.terms.term.contains(a)) return {a, go(body)};
    std::string fresh = fresh_name_avoiding(a, [&](const std::string& n) {
      return range_.terms.term.contains(n) || body->fv.terms.term.contains(n);
    });
    return {fresh, go(formula_subst(body, TermSubst{a, mk::tvar(fresh)}))};
  }

  std::pair<std::string, Formula> pred_binder(const std::string& x, int arity, const Formula& body) {
    if (auto* s = std::get_if<std::pair<std::string, PredicateDef>>(&b_); s && s->first == x) return {x, body};
    if (!range_.preds.contains(x)) return {x, go(body)};
    std::string fresh = fresh_name_avoiding(x, [&](const std::string& n) {
      return range_.preds.contains(n) || body->fv.preds.contains(n);
    });
    std::vector<std::string> params;
    std::vector<Term> args;
    for (int i = 0; i < arity; ++i) {
      params.push_back("p" + std::to_string(i));
      args.push_back(mk::tvar(params.back()));
    }
    Formula renamed =
        formula_subst(body, std::pair{x, PredicateDef{params, fm::pred(fresh, std::move(args))}});
    return {fresh, go(renamed)};
  }

  const FormulaBinding& b_;
  FormulaFV range_;
};

}  // namespace

Formula formula_subst(const Formula& f, const FormulaBinding& b) { return FormulaSubst(b).go(f); }

// ---------------------------------------------------------------------------
// Named types

namespace {

// Names reachable from f without passing a record or variant former.
void unguarded_names(const Formula& f, std::set<std::string>& out) {
  std::visit(overloaded{[&](const Named& n) { out.insert(n.name); },
                        [&](const Arrow& a) {
                          unguarded_names(a.dom, out);
                          unguarded_names(a.cod, out);
                        },
                        [&](const ForallTerm& q) { unguarded_names(q.body, out); },
                        [&](const ExistsTerm& q) { unguarded_names(q.body, out); },
                        [&](const ForallPred& q) { unguarded_names(q.body, out); },
                        [&](const ExistsPred& q) { unguarded_names(q.body, out); },
                        [&](const Member& m) { unguarded_names(m.type, out); },
                        [&](const Restrict& r) { unguarded_names(r.type, out); },
                        [](const auto&) {}},
             f->node);
}

}  // namespace

std::optional<std::string> TypeTable::define(const std::string& name, Formula body) {
  if (defs_.count(name)) return fmt::format("type {} is already defined", name);
  // Follow unguarded references; reaching `name` again means no former guards the cycle.
  std::set<std::string> seen;
  std::vector<std::string> todo;
  std::set<std::string> first;
  unguarded_names(body, first);
  todo.assign(first.begin(), first.end());
  while (!todo.empty()) {
    std::string n = todo.back();
    todo.pop_back();
    if (n == name) return fmt::format("type {} is defined in terms of itself without a guarding former", name);
    if (!seen.insert(n).second) continue;
    auto it = defs_.find(n);
    if (it == defs_.end()) continue;
    std::set<std::string> next;
    unguarded_names(it->second, next);
    todo.insert(todo.end(), next.begin(), next.end());
  }
  defs_.emplace(name, std::move(body));
  return std::nullopt;
}

const Formula* TypeTable::lookup(const std::string& name) const {
  auto it = defs_.find(name);
  return it == defs_.end() ? nullptr : &it->second;
}

Formula unfold_head(const Formula& f, const TypeTable* table) {
  auto* n = as<Named>(f);
  if (!n || !table) return f;
  const Formula* d = table->lookup(n->name);
  return d ? *d : f;
}

// ---------------------------------------------------------------------------
// Equality

namespace {

struct FormulaAlpha {
  const TypeTable* table = nullptr;
  AlphaEnv env;
  std::vector<std::pair<std::string, std::string>> preds;
  std::set<std::pair<std::string, std::string>> assumed;

  bool term(const Term& a, const Term& b) { return alpha_eq(a, b, env); }

  bool go(const Formula& a, const Formula& b) {
    if (a == b && env.term.empty() && preds.empty()) return true;
    auto* na = as<Named>(a);
    auto* nb = as<Named>(b);
    if (na && nb && na->name == nb->name) return true;
    if (table && (na || nb)) {
      if (na && nb) {
        auto key = std::pair{na->name, nb->name};
        if (assumed.count(key)) return true;
        assumed.insert(key);
      }
      Formula ua = unfold_head(a, table);
      Formula ub = unfold_head(b, table);
      if (ua == a && ub == b) return false;
      return go(ua, ub);
    }
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const PredApp& p) {
              auto& q = std::get<PredApp>(b->node);
              if (!alpha_var_eq(preds, p.var, q.var) || p.args.size() != q.args.size()) return false;
              for (std::size_t i = 0; i < p.args.size(); ++i)
                if (!term(p.args[i], q.args[i])) return false;
              return true;
            },
            [&](const Arrow& p) {
              auto& q = std::get<Arrow>(b->node);
              return go(p.dom, q.dom) && go(p.cod, q.cod);
            },
            [&](const ForallTerm& p) { return term_binder(p.var, p.body, std::get<ForallTerm>(b->node)); },
            [&](const ExistsTerm& p) { return term_binder(p.var, p.body, std::get<ExistsTerm>(b->node)); },
            [&](const ForallPred& p) {
              auto& q = std::get<ForallPred>(b->node);
              return p.arity == q.arity && pred_binder(p.var, p.body, q.var, q.body);
            },
            [&](const ExistsPred& p) {
              auto& q = std::get<ExistsPred>(b->node);
              return p.arity == q.arity && pred_binder(p.var, p.body, q.var, q.body);
            },
            [&](const RecordTy& p) { return maps(p.fields, std::get<RecordTy>(b->node).fields); },
            [&](const VariantTy& p) { return maps(p.ctors, std::get<VariantTy>(b->node).ctors); },
            [&](const Member& p) {
              auto& q = std::get<Member>(b->node);
              return term(p.term, q.term) && go(p.type, q.type);
            },
            [&](const Restrict& p) {
              auto& q = std::get<Restrict>(b->node);
              return go(p.type, q.type) && term(p.lhs, q.lhs) && term(p.rhs, q.rhs);
            },
            [&](const Named&) { return false; }},
        a->node);
  }

  template <class Q>
  bool term_binder(const std::string& x, const Formula& body, const Q& q) {
    env.term.emplace_back(x, q.var);
    bool r = go(body, q.body);
    env.term.pop_back();
    return r;
  }

  bool pred_binder(const std::string& x, const Formula& a, const std::string& y, const Formula& b) {
    preds.emplace_back(x, y);
    bool r = go(a, b);
    preds.pop_back();
    return r;
  }

  bool maps(const std::map<std::string, Formula>& a, const std::map<std::string, Formula>& b) {
    if (a.size() != b.size()) return false;
    for (auto i = a.begin(), j = b.begin(); i != a.end(); ++i, ++j)
      if (i->first != j->first || !go(i->second, j->second)) return false;
    return true;
  }
};

}  // namespace

bool formula_alpha_eq(const Formula& a, const Formula& b) {
  FormulaAlpha eq;
  return eq.go(a, b);
}

bool formula_equiv(const Formula& a, const Formula& b, const TypeTable* table) {
  FormulaAlpha eq;
  eq.table = table;
  return eq.go(a, b);
}

// ---------------------------------------------------------------------------
// Purity

namespace {

bool pure(const Formula& f, const TypeTable* table, std::set<std::string>& seen) {
  return std::visit(overloaded{[](const PredApp&) { return true; },
                               [](const Arrow&) { return false; },
                               [&](const ForallTerm& q) { return pure(q.body, table, seen); },
                               [&](const ExistsTerm& q) { return pure(q.body, table, seen); },
                               [&](const ForallPred& q) { return pure(q.body, table, seen); },
                               [&](const ExistsPred& q) { return pure(q.body, table, seen); },
                               [&](const RecordTy& r) {
                                 for (const auto& [l, a] : r.fields)
                                   if (!pure(a, table, seen)) return false;
                                 return true;
                               },
                               [&](const VariantTy& v) {
                                 for (const auto& [c, a] : v.ctors)
                                   if (!pure(a, table, seen)) return false;
                                 return true;
                               },
                               [&](const Member& m) { return pure(m.type, table, seen); },
                               [&](const Restrict& r) { return pure(r.type, table, seen); },
                               [&](const Named& n) {
                                 if (!table || !seen.insert(n.name).second) return true;
                                 const Formula* d = table->lookup(n.name);
                                 return !d || pure(*d, table, seen);
                               }},
                    f->node);
}

}  // namespace

bool is_pure(const Formula& f, const TypeTable* table) {
  std::set<std::string> seen;
  return pure(f, table, seen);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

std::string subscript(int n) {
  static const char* digits[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
  std::string s = std::to_string(n);
  std::string out;
  for (char c : s) out += digits[c - '0'];
  return out;
}

std::string term_str(const Term& t) { return to_string(t, Prec::AppFun); }

// 0: binders and arrows, 1: restriction, membership, equations, 2: atoms.
std::string print(const Formula& f, int level) {
  auto paren = [&](int own, std::string s) { return own < level ? "(" + s + ")" : s; };
  if (is_bot(f)) return "⊥";
  if (is_top(f)) return "⊤";
  if (auto pi = as_pi(f)) return paren(0, fmt::format("Π {}:{} {}", pi->var, print(pi->domain, 2), print(pi->body, 0)));
  if (auto* a = as<Arrow>(f)) {
    auto* r = as<Restrict>(a->dom);
    if (r && is_top(r->type) && is_bot(a->cod))
      return paren(1, fmt::format("{} ≢ {}", term_str(r->lhs), term_str(r->rhs)));
  }
  return std::visit(
      overloaded{
          [&](const PredApp& p) {
            if (p.args.empty()) return p.var;
            std::string s = p.var + "(";
            for (std::size_t i = 0; i < p.args.size(); ++i) s += (i ? ", " : "") + to_string(p.args[i]);
            return s + ")";
          },
          [&](const Arrow& a) { return paren(0, print(a.dom, 1) + " ⇒ " + print(a.cod, 0)); },
          [&](const ForallTerm& q) { return paren(0, "∀" + q.var + " " + print(q.body, 0)); },
          [&](const ExistsTerm& q) { return paren(0, "∃" + q.var + " " + print(q.body, 0)); },
          [&](const ForallPred& q) { return paren(0, "∀" + q.var + subscript(q.arity) + " " + print(q.body, 0)); },
          [&](const ExistsPred& q) { return paren(0, "∃" + q.var + subscript(q.arity) + " " + print(q.body, 0)); },
          [&](const RecordTy& r) {
            std::string s = "{";
            bool first = true;
            for (const auto& [l, a] : r.fields) {
              s += (first ? "" : "; ") + l + " : " + print(a, 0);
              first = false;
            }
            return s + "}";
          },
          [&](const VariantTy& v) {
            std::string s = "[";
            bool first = true;
            for (const auto& [c, a] : v.ctors) {
              s += (first ? "" : " | ") + c + " : " + print(a, 0);
              first = false;
            }
            return s + "]";
          },
          [&](const Member& m) { return paren(1, term_str(m.term) + " ∈ " + print(m.type, 2)); },
          [&](const Restrict& r) {
            if (is_top(r.type)) return paren(1, term_str(r.lhs) + " ≡ " + term_str(r.rhs));
            return paren(1, print(r.type, 2) + " ↾ " + term_str(r.lhs) + " ≡ " + term_str(r.rhs));
          },
          [&](const Named& n) { return n.name; }},
      f->node);
}

}  // namespace

std::string to_string(const Formula& f) { return print(f, 0); }

// ---------------------------------------------------------------------------
// Contexts

TypingContext TypingContext::with(ContextEntry e) const {
  TypingContext g = *this;
  g.entries.push_back(std::move(e));
  return g;
}

bool TypingContext::declares(const std::string& name) const {
  for (const auto& e : entries) {
    bool hit = std::visit(overloaded{[&](const LambdaHyp& h) { return h.var == name; },
                                     [&](const StackHyp& h) { return h.var == name; },
                                     [&](const TermDecl& h) { return h.var == name; },
                                     [&](const PredDecl& h) { return h.var == name; },
                                     [](const auto&) { return false; }},
                          e);
    if (hit) return true;
  }
  return false;
}

const Formula* TypingContext::lambda_type(const std::string& x) const {
  for (auto it = entries.rbegin(); it != entries.rend(); ++it)
    if (auto* h = std::get_if<LambdaHyp>(&*it); h && h->var == x) return &h->type;
  return nullptr;
}

const Formula* TypingContext::stack_type(const std::string& alpha) const {
  for (auto it = entries.rbegin(); it != entries.rend(); ++it)
    if (auto* h = std::get_if<StackHyp>(&*it); h && h->var == alpha) return &h->type;
  return nullptr;
}

FormulaFV TypingContext::free_vars() const {
  FormulaFV fv;
  for (const auto& e : entries) {
    std::visit(overloaded{[&](const LambdaHyp& h) {
                            fv.terms.lambda.insert(h.var);
                            add_fv(fv, h.type);
                          },
                          [&](const StackHyp& h) {
                            fv.terms.mu.insert(h.var);
                            add_fv(fv, h.type);
                          },
                          [&](const TermDecl& h) { fv.terms.term.insert(h.var); },
                          [&](const PredDecl& h) { fv.preds.insert(h.var); },
                          [&](const EquivHyp& h) {
                            fv.terms.merge(h.lhs->fv);
                            fv.terms.merge(h.rhs->fv);
                          },
                          [&](const InequivHyp& h) {
                            fv.terms.merge(h.lhs->fv);
                            fv.terms.merge(h.rhs->fv);
                          }},
               e);
  }
  return fv;
}

bool TypingContext::has_equation(const Term& t, const Term& u) const {
  for (const auto& e : entries)
    if (auto* h = std::get_if<EquivHyp>(&e))
      if ((alpha_eq(h->lhs, t) && alpha_eq(h->rhs, u)) || (alpha_eq(h->lhs, u) && alpha_eq(h->rhs, t))) return true;
  return false;
}

namespace {

struct Domain {
  NameSet lambda, mu, term, preds;

  std::optional<std::string> missing(const FormulaFV& fv) const {
    for (const auto& x : fv.terms.lambda)
      if (!lambda.contains(x)) return "λ-variable " + x;
    for (const auto& x : fv.terms.mu)
      if (!mu.contains(x)) return "stack variable " + x;
    for (const auto& x : fv.terms.term)
      if (!term.contains(x)) return "term variable " + x;
    for (const auto& x : fv.preds)
      if (!preds.contains(x)) return "predicate variable " + x;
    return std::nullopt;
  }
};

}  // namespace

Validity context_valid(const TypingContext& g) {
  Domain dom;
  for (std::size_t i = 0; i < g.entries.size(); ++i) {
    auto fail = [&](std::string msg) { return Validity{false, i, std::move(msg)}; };
    const auto& e = g.entries[i];
    if (auto* h = std::get_if<LambdaHyp>(&e)) {
      if (dom.lambda.contains(h->var)) return fail(h->var + " is already declared");
      dom.lambda.insert(h->var);
      if (auto m = dom.missing(h->type->fv)) return fail(*m + " is not in scope in the type of " + h->var);
    } else if (auto* h = std::get_if<StackHyp>(&e)) {
      if (dom.mu.contains(h->var)) return fail(h->var + " is already declared");
      if (auto m = dom.missing(h->type->fv)) return fail(*m + " is not in scope in the type of " + h->var);
      dom.mu.insert(h->var);
    } else if (auto* h = std::get_if<TermDecl>(&e)) {
      if (dom.term.contains(h->var)) return fail(h->var + " is already declared");
      dom.term.insert(h->var);
    } else if (auto* h = std::get_if<PredDecl>(&e)) {
      if (dom.preds.contains(h->var)) return fail(h->var + " is already declared");
      dom.preds.insert(h->var);
    } else {
      const Term& t = std::holds_alternative<EquivHyp>(e) ? std::get<EquivHyp>(e).lhs : std::get<InequivHyp>(e).lhs;
      const Term& u = std::holds_alternative<EquivHyp>(e) ? std::get<EquivHyp>(e).rhs : std::get<InequivHyp>(e).rhs;
      FormulaFV fv;
      fv.terms = t->fv;
      fv.terms.merge(u->fv);
      if (auto m = dom.missing(fv)) return fail(*m + " is not in scope in an equation");
    }
  }
  return Validity{};
}

EquationalContext restrict_to_equational(const TypingContext& g) {
  EquationalContext e;
  for (const auto& entry : g.entries) {
    if (auto* h = std::get_if<EquivHyp>(&entry)) e.push_back(Claim{h->lhs, h->rhs, Polarity::Equiv});
    if (auto* h = std::get_if<InequivHyp>(&entry)) e.push_back(Claim{h->lhs, h->rhs, Polarity::Inequiv});
  }
  return e;
}

std::string to_string(const ContextEntry& e) {
  return std::visit(overloaded{[](const LambdaHyp& h) { return h.var + " : " + to_string(h.type); },
                               [](const StackHyp& h) { return h.var + " : ¬" + print(h.type, 2); },
                               [](const TermDecl& h) { return h.var + " : Term"; },
                               [](const PredDecl& h) { return h.var + " : Pred" + subscript(h.arity); },
                               [](const EquivHyp& h) { return term_str(h.lhs) + " ≡ " + term_str(h.rhs); },
                               [](const InequivHyp& h) { return term_str(h.lhs) + " ≢ " + term_str(h.rhs); }},
                    e);
}

std::string to_string(const TypingContext& g) {
  if (g.entries.empty()) return "•";
  std::string s;
  for (const auto& e : g.entries) {
    if (!s.empty()) s += ", ";
    s += to_string(e);
  }
  return s;
}

}  // namespace svr
