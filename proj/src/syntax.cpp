#include "svr/syntax.hpp"

#include <algorithm>

#include "util.hpp"

namespace svr {

namespace {

Value make_value(decltype(ValueNode::node) n, VarSets fv) {
  return std::make_shared<const ValueNode>(ValueNode{std::move(n), std::move(fv)});
}
Term make_term(decltype(TermNode::node) n, VarSets fv) {
  return std::make_shared<const TermNode>(TermNode{std::move(n), std::move(fv)});
}
Stack make_stack(decltype(StackNode::node) n, VarSets fv) {
  return std::make_shared<const StackNode>(StackNode{std::move(n), std::move(fv)});
}

VarSets without_lambda(VarSets fv, const std::string& x) {
  fv.lambda.erase(x);
  return fv;
}

}  // namespace

namespace mk {

Value var(std::string x) {
  VarSets fv;
  fv.lambda.insert(x);
  return make_value(LambdaVar{std::move(x)}, std::move(fv));
}

Value lam(std::string x, Term body) {
  VarSets fv = without_lambda(body->fv, x);
  return make_value(Lambda{std::move(x), std::move(body)}, std::move(fv));
}

Value ctor(std::string c, Value payload) {
  VarSets fv = payload->fv;
  return make_value(Ctor{std::move(c), std::move(payload)}, std::move(fv));
}

Value ctor(std::string c) { return ctor(std::move(c), unit()); }

Value record(std::map<std::string, Value> fields) {
  VarSets fv;
  for (const auto& [l, v] : fields) fv.merge(v->fv);
  return make_value(Record{std::move(fields)}, std::move(fv));
}

Value unit() { return record({}); }

Value scissors() { return make_value(Scissors{}, {}); }

Term val(Value v) {
  VarSets fv = v->fv;
  return make_term(Val{std::move(v)}, std::move(fv));
}

Term tvar(std::string a) {
  VarSets fv;
  fv.term.insert(a);
  return make_term(TermVar{std::move(a)}, std::move(fv));
}

Term app(Term f, Term u) {
  VarSets fv = f->fv;
  fv.merge(u->fv);
  return make_term(App{std::move(f), std::move(u)}, std::move(fv));
}

Term apps(Term f, std::vector<Term> args) {
  for (auto& a : args) f = app(std::move(f), std::move(a));
  return f;
}

Term mu(std::string alpha, Term body) {
  VarSets fv = body->fv;
  fv.mu.erase(alpha);
  return make_term(Mu{std::move(alpha), std::move(body)}, std::move(fv));
}

Term proc(Term t, Stack s) {
  VarSets fv = t->fv;
  fv.merge(s->fv);
  return make_term(Proc{Process{std::move(t), std::move(s)}}, std::move(fv));
}

Term proj(Value v, std::string label) {
  VarSets fv = v->fv;
  return make_term(Proj{std::move(v), std::move(label)}, std::move(fv));
}

Term case_of(Value v, std::map<std::string, Branch> branches) {
  VarSets fv = v->fv;
  for (const auto& [c, b] : branches) fv.merge(without_lambda(b.body->fv, b.var));
  return make_term(Case{std::move(v), std::move(branches)}, std::move(fv));
}

Term delta(Value v, Value w) {
  VarSets fv = v->fv;
  fv.merge(w->fv);
  return make_term(Delta{std::move(v), std::move(w)}, std::move(fv));
}

Term unit_probe(Value v) {
  VarSets fv = v->fv;
  return make_term(UnitProbe{std::move(v)}, std::move(fv));
}

Stack svar(std::string alpha) {
  VarSets fv;
  fv.mu.insert(alpha);
  return make_stack(StackVar{std::move(alpha)}, std::move(fv));
}

Stack push(Value v, Stack tail) {
  VarSets fv = v->fv;
  fv.merge(tail->fv);
  return make_stack(Push{std::move(v), std::move(tail)}, std::move(fv));
}

Stack frame(Term t, Stack tail) {
  VarSets fv = t->fv;
  fv.merge(tail->fv);
  return make_stack(Frame{std::move(t), std::move(tail)}, std::move(fv));
}

}  // namespace mk

bool is_empty_record(const Value& v) {
  auto* r = as<Record>(v);
  return r && r->fields.empty();
}

const VarSets& free_vars(const Value& v) { return v->fv; }
const VarSets& free_vars(const Term& t) { return t->fv; }
const VarSets& free_vars(const Stack& s) { return s->fv; }
VarSets free_vars(const Process& p) {
  VarSets fv = p.term->fv;
  fv.merge(p.stack->fv);
  return fv;
}

const std::string& stack_bottom(const Stack& s) {
  const StackNode* n = s.get();
  for (;;) {
    if (auto* v = std::get_if<StackVar>(&n->node)) return v->name;
    if (auto* p = std::get_if<Push>(&n->node))
      n = p->tail.get();
    else
      n = std::get<Frame>(n->node).tail.get();
  }
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

class Substituter {
 public:
  explicit Substituter(const Binding& b) : b_(b) {
    std::visit(overloaded{[&](const LambdaSubst& s) {
                            kind_ = 0;
                            var_ = s.var;
                            repl_ = s.value->fv;
                          },
                          [&](const StackSubst& s) {
                            kind_ = 1;
                            var_ = s.var;
                            repl_ = s.stack->fv;
                          },
                          [&](const TermSubst& s) {
                            kind_ = 2;
                            var_ = s.var;
                            repl_ = s.term->fv;
                          }},
               b_);
  }

  bool touches(const VarSets& fv) const {
    switch (kind_) {
      case 0: return fv.lambda.contains(var_);
      case 1: return fv.mu.contains(var_);
      default: return fv.term.contains(var_);
    }
  }

  Value value(const Value& v) {
    if (!touches(v->fv)) return v;
    return std::visit(
        overloaded{[&](const LambdaVar&) -> Value { return std::get<LambdaSubst>(b_).value; },
                   [&](const Lambda& l) -> Value {
                     auto [x, body] = open_lambda_binder(l.param, l.body);
                     return mk::lam(x, term(body));
                   },
                   [&](const Ctor& c) -> Value { return mk::ctor(c.name, value(c.payload)); },
                   [&](const Record& r) -> Value {
                     std::map<std::string, Value> f;
                     for (const auto& [l, w] : r.fields) f.emplace(l, value(w));
                     return mk::record(std::move(f));
                   },
                   [&](const Scissors&) -> Value { return v; }},
        v->node);
  }

  Term term(const Term& t) {
    if (!touches(t->fv)) return t;
    return std::visit(
        overloaded{[&](const Val& x) -> Term { return mk::val(value(x.value)); },
                   [&](const TermVar&) -> Term { return std::get<TermSubst>(b_).term; },
                   [&](const App& a) -> Term { return mk::app(term(a.fun), term(a.arg)); },
                   [&](const Mu& m) -> Term {
                     std::string alpha = m.var;
                     Term body = m.body;
                     if (repl_.mu.contains(alpha)) {
                       std::string fresh = fresh_name_avoiding(alpha, [&](const std::string& n) {
                         return repl_.mu.contains(n) || body->fv.mu.contains(n);
                       });
                       body = subst(body, StackSubst{alpha, mk::svar(fresh)});
                       alpha = fresh;
                     }
                     return mk::mu(alpha, term(body));
                   },
                   [&](const Proc& p) -> Term {
                     return mk::proc(term(p.process.term), stack(p.process.stack));
                   },
                   [&](const Proj& p) -> Term { return mk::proj(value(p.record), p.label); },
                   [&](const Case& c) -> Term {
                     std::map<std::string, Branch> bs;
                     for (const auto& [k, b] : c.branches) {
                       if (kind_ == 0 && b.var == var_) {
                         bs.emplace(k, b);
                         continue;
                       }
                       auto [x, body] = open_lambda_binder(b.var, b.body);
                       bs.emplace(k, Branch{x, term(body)});
                     }
                     return mk::case_of(value(c.scrutinee), std::move(bs));
                   },
                   [&](const Delta& d) -> Term { return mk::delta(value(d.left), value(d.right)); },
                   [&](const UnitProbe& u) -> Term { return mk::unit_probe(value(u.arg)); }},
        t->node);
  }

  Stack stack(const Stack& s) {
    if (!touches(s->fv)) return s;
    return std::visit(
        overloaded{[&](const StackVar&) -> Stack { return std::get<StackSubst>(b_).stack; },
                   [&](const Push& p) -> Stack { return mk::push(value(p.head), stack(p.tail)); },
                   [&](const Frame& f) -> Stack { return mk::frame(term(f.fun), stack(f.tail)); }},
        s->node);
  }

 private:
  // Renames a lambda binder when it would capture a variable of the substitutend.
  std::pair<std::string, Term> open_lambda_binder(const std::string& x, const Term& body) {
    if (!repl_.lambda.contains(x)) return {x, body};
    std::string fresh = fresh_name_avoiding(x, [&](const std::string& n) {
      return repl_.lambda.contains(n) || body->fv.lambda.contains(n);
    });
    return {fresh, subst(body, LambdaSubst{x, mk::var(fresh)})};
  }

  const Binding& b_;
  int kind_ = 0;
  std::string var_;
  VarSets repl_;
};

}  // namespace

Value subst(const Value& v, const Binding& b) { return Substituter(b).value(v); }
Term subst(const Term& t, const Binding& b) { return Substituter(b).term(t); }
Stack subst(const Stack& s, const Binding& b) { return Substituter(b).stack(s); }
Process subst(const Process& p, const Binding& b) {
  Substituter s(b);
  return Process{s.term(p.term), s.stack(p.stack)};
}

// ---------------------------------------------------------------------------
// Alpha equivalence

bool alpha_var_eq(const std::vector<std::pair<std::string, std::string>>& pairs, const std::string& x,
                  const std::string& y) {
  for (auto it = pairs.rbegin(); it != pairs.rend(); ++it) {
    bool lx = it->first == x;
    bool ry = it->second == y;
    if (lx || ry) return lx && ry;
  }
  return x == y;
}

bool alpha_eq(const Value& a, const Value& b, AlphaEnv& env) {
  if (a == b && env.lambda.empty() && env.mu.empty() && env.term.empty()) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{[&](const LambdaVar& x) {
                   return alpha_var_eq(env.lambda, x.name, std::get<LambdaVar>(b->node).name);
                 },
                 [&](const Lambda& l) {
                   const auto& r = std::get<Lambda>(b->node);
                   env.lambda.emplace_back(l.param, r.param);
                   bool ok = alpha_eq(l.body, r.body, env);
                   env.lambda.pop_back();
                   return ok;
                 },
                 [&](const Ctor& c) {
                   const auto& d = std::get<Ctor>(b->node);
                   return c.name == d.name && alpha_eq(c.payload, d.payload, env);
                 },
                 [&](const Record& r) {
                   const auto& s = std::get<Record>(b->node);
                   if (r.fields.size() != s.fields.size()) return false;
                   auto i = r.fields.begin();
                   auto j = s.fields.begin();
                   for (; i != r.fields.end(); ++i, ++j)
                     if (i->first != j->first || !alpha_eq(i->second, j->second, env)) return false;
                   return true;
                 },
                 [&](const Scissors&) { return true; }},
      a->node);
}

bool alpha_eq(const Term& a, const Term& b, AlphaEnv& env) {
  if (a == b && env.lambda.empty() && env.mu.empty() && env.term.empty()) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{[&](const Val& v) { return alpha_eq(v.value, std::get<Val>(b->node).value, env); },
                 [&](const TermVar& x) {
                   return alpha_var_eq(env.term, x.name, std::get<TermVar>(b->node).name);
                 },
                 [&](const App& x) {
                   const auto& y = std::get<App>(b->node);
                   return alpha_eq(x.fun, y.fun, env) && alpha_eq(x.arg, y.arg, env);
                 },
                 [&](const Mu& m) {
                   const auto& n = std::get<Mu>(b->node);
                   env.mu.emplace_back(m.var, n.var);
                   bool ok = alpha_eq(m.body, n.body, env);
                   env.mu.pop_back();
                   return ok;
                 },
                 [&](const Proc& p) {
                   const auto& q = std::get<Proc>(b->node);
                   return alpha_eq(p.process.term, q.process.term, env) &&
                          alpha_eq(p.process.stack, q.process.stack, env);
                 },
                 [&](const Proj& p) {
                   const auto& q = std::get<Proj>(b->node);
                   return p.label == q.label && alpha_eq(p.record, q.record, env);
                 },
                 [&](const Case& c) {
                   const auto& d = std::get<Case>(b->node);
                   if (c.branches.size() != d.branches.size()) return false;
                   if (!alpha_eq(c.scrutinee, d.scrutinee, env)) return false;
                   auto i = c.branches.begin();
                   auto j = d.branches.begin();
                   for (; i != c.branches.end(); ++i, ++j) {
                     if (i->first != j->first) return false;
                     env.lambda.emplace_back(i->second.var, j->second.var);
                     bool ok = alpha_eq(i->second.body, j->second.body, env);
                     env.lambda.pop_back();
                     if (!ok) return false;
                   }
                   return true;
                 },
                 [&](const Delta& d) {
                   const auto& e = std::get<Delta>(b->node);
                   return alpha_eq(d.left, e.left, env) && alpha_eq(d.right, e.right, env);
                 },
                 [&](const UnitProbe& u) { return alpha_eq(u.arg, std::get<UnitProbe>(b->node).arg, env); }},
      a->node);
}

bool alpha_eq(const Stack& a, const Stack& b, AlphaEnv& env) {
  if (a == b && env.lambda.empty() && env.mu.empty() && env.term.empty()) return true;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(overloaded{[&](const StackVar& x) {
                                 return alpha_var_eq(env.mu, x.name, std::get<StackVar>(b->node).name);
                               },
                               [&](const Push& p) {
                                 const auto& q = std::get<Push>(b->node);
                                 return alpha_eq(p.head, q.head, env) && alpha_eq(p.tail, q.tail, env);
                               },
                               [&](const Frame& f) {
                                 const auto& g = std::get<Frame>(b->node);
                                 return alpha_eq(f.fun, g.fun, env) && alpha_eq(f.tail, g.tail, env);
                               }},
                    a->node);
}

bool alpha_eq(const Value& a, const Value& b) {
  AlphaEnv env;
  return alpha_eq(a, b, env);
}
bool alpha_eq(const Term& a, const Term& b) {
  AlphaEnv env;
  return alpha_eq(a, b, env);
}
bool alpha_eq(const Stack& a, const Stack& b) {
  AlphaEnv env;
  return alpha_eq(a, b, env);
}
bool alpha_eq(const Process& a, const Process& b) {
  AlphaEnv env;
  return alpha_eq(a.term, b.term, env) && alpha_eq(a.stack, b.stack, env);
}

// ---------------------------------------------------------------------------
// Canonical keys

namespace {

class KeyWriter {
 public:
  std::string out;

  void value(const Value& v) {
    std::visit(overloaded{[&](const LambdaVar& x) { var(lambda_, x.name, "#", "x:"); },
                          [&](const Lambda& l) {
                            out += "(L ";
                            lambda_.push_back(l.param);
                            term(l.body);
                            lambda_.pop_back();
                            out += ')';
                          },
                          [&](const Ctor& c) {
                            out += "C:" + c.name + "[";
                            value(c.payload);
                            out += ']';
                          },
                          [&](const Record& r) {
                            out += '{';
                            for (const auto& [l, w] : r.fields) {
                              out += l + "=";
                              value(w);
                              out += ';';
                            }
                            out += '}';
                          },
                          [&](const Scissors&) { out += '!'; }},
               v->node);
  }

  void term(const Term& t) {
    std::visit(overloaded{[&](const Val& v) { value(v.value); },
                          [&](const TermVar& a) { out += "t:" + a.name; },
                          [&](const App& a) {
                            out += "(A ";
                            term(a.fun);
                            out += ' ';
                            term(a.arg);
                            out += ')';
                          },
                          [&](const Mu& m) {
                            out += "(M ";
                            mu_.push_back(m.var);
                            term(m.body);
                            mu_.pop_back();
                            out += ')';
                          },
                          [&](const Proc& p) {
                            out += "(P ";
                            term(p.process.term);
                            out += ' ';
                            stack(p.process.stack);
                            out += ')';
                          },
                          [&](const Proj& p) {
                            out += "(J ";
                            value(p.record);
                            out += ' ' + p.label + ')';
                          },
                          [&](const Case& c) {
                            out += "(K ";
                            value(c.scrutinee);
                            for (const auto& [k, b] : c.branches) {
                              out += ' ' + k + "(";
                              lambda_.push_back(b.var);
                              term(b.body);
                              lambda_.pop_back();
                              out += ')';
                            }
                            out += ')';
                          },
                          [&](const Delta& d) {
                            out += "(D ";
                            value(d.left);
                            out += ' ';
                            value(d.right);
                            out += ')';
                          },
                          [&](const UnitProbe& u) {
                            out += "(U ";
                            value(u.arg);
                            out += ')';
                          }},
               t->node);
  }

  void stack(const Stack& s) {
    std::visit(overloaded{[&](const StackVar& a) { var(mu_, a.name, "#m", "a:"); },
                          [&](const Push& p) {
                            out += "(. ";
                            value(p.head);
                            out += ' ';
                            stack(p.tail);
                            out += ')';
                          },
                          [&](const Frame& f) {
                            out += "([ ";
                            term(f.fun);
                            out += ' ';
                            stack(f.tail);
                            out += ')';
                          }},
               s->node);
  }

 private:
  void var(const std::vector<std::string>& scope, const std::string& name, const char* bound,
           const char* free) {
    for (std::size_t i = scope.size(); i-- > 0;) {
      if (scope[i] == name) {
        out += bound + std::to_string(scope.size() - 1 - i);
        return;
      }
    }
    out += free + name;
  }

  std::vector<std::string> lambda_;
  std::vector<std::string> mu_;
};

}  // namespace

std::string canonical_key(const Term& t) {
  KeyWriter w;
  w.term(t);
  return std::move(w.out);
}

std::string canonical_key(const Value& v) {
  KeyWriter w;
  w.value(v);
  return std::move(w.out);
}

// ---------------------------------------------------------------------------
// Size and delta-freedom

std::size_t size(const Value& v) {
  return std::visit(overloaded{[](const LambdaVar&) -> std::size_t { return 1; },
                               [](const Lambda& l) -> std::size_t { return 1 + size(l.body); },
                               [](const Ctor& c) -> std::size_t { return 1 + size(c.payload); },
                               [](const Record& r) -> std::size_t {
                                 std::size_t n = 1;
                                 for (const auto& [l, w] : r.fields) n += size(w);
                                 return n;
                               },
                               [](const Scissors&) -> std::size_t { return 1; }},
                    v->node);
}

std::size_t size(const Term& t) {
  return std::visit(overloaded{[](const Val& v) -> std::size_t { return size(v.value); },
                               [](const TermVar&) -> std::size_t { return 1; },
                               [](const App& a) -> std::size_t { return 1 + size(a.fun) + size(a.arg); },
                               [](const Mu& m) -> std::size_t { return 1 + size(m.body); },
                               [](const Proc& p) -> std::size_t { return 1 + size(p.process); },
                               [](const Proj& p) -> std::size_t { return 1 + size(p.record); },
                               [](const Case& c) -> std::size_t {
                                 std::size_t n = 1 + size(c.scrutinee);
                                 for (const auto& [k, b] : c.branches) n += size(b.body);
                                 return n;
                               },
                               [](const Delta& d) -> std::size_t { return 1 + size(d.left) + size(d.right); },
                               [](const UnitProbe& u) -> std::size_t { return 1 + size(u.arg); }},
                    t->node);
}

std::size_t size(const Stack& s) {
  return std::visit(overloaded{[](const StackVar&) -> std::size_t { return 1; },
                               [](const Push& p) -> std::size_t { return 1 + size(p.head) + size(p.tail); },
                               [](const Frame& f) -> std::size_t { return 1 + size(f.fun) + size(f.tail); }},
                    s->node);
}

std::size_t size(const Process& p) { return size(p.term) + size(p.stack); }

bool delta_free(const Value& v) {
  return std::visit(overloaded{[](const Lambda& l) { return delta_free(l.body); },
                               [](const Ctor& c) { return delta_free(c.payload); },
                               [](const Record& r) {
                                 return std::all_of(r.fields.begin(), r.fields.end(),
                                                    [](const auto& f) { return delta_free(f.second); });
                               },
                               [](const auto&) { return true; }},
                    v->node);
}

bool delta_free(const Term& t) {
  return std::visit(overloaded{[](const Val& v) { return delta_free(v.value); },
                               [](const TermVar&) { return true; },
                               [](const App& a) { return delta_free(a.fun) && delta_free(a.arg); },
                               [](const Mu& m) { return delta_free(m.body); },
                               [](const Proc& p) { return delta_free(p.process.term) && delta_free(p.process.stack); },
                               [](const Proj& p) { return delta_free(p.record); },
                               [](const Case& c) {
                                 if (!delta_free(c.scrutinee)) return false;
                                 for (const auto& [k, b] : c.branches)
                                   if (!delta_free(b.body)) return false;
                                 return true;
                               },
                               [](const Delta&) { return false; },
                               [](const UnitProbe&) { return false; }},
                    t->node);
}

bool delta_free(const Stack& s) {
  return std::visit(overloaded{[](const StackVar&) { return true; },
                               [](const Push& p) { return delta_free(p.head) && delta_free(p.tail); },
                               [](const Frame& f) { return delta_free(f.fun) && delta_free(f.tail); }},
                    s->node);
}

}  // namespace svr
