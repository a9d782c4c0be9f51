#include <algorithm>

#include "rewrite.hpp"
#include "util.hpp"

namespace svr {

void RuleSet::recompute_vars() {
  vars = VarSets{};
  for (const auto& [x, v] : lambda_rules) {
    vars.lambda.insert(x);
    vars.merge(v->fv);
  }
  for (const auto& [a, t] : term_rules) {
    vars.term.insert(a);
    vars.merge(t->fv);
  }
  for (const auto& [f, v] : recursive) {
    vars.lambda.insert(f);
    vars.merge(v->fv);
  }
  for (const auto& [k, lr] : whole) {
    vars.merge(lr.first->fv);
    vars.merge(lr.second->fv);
  }
}

Rewriter::Rewriter(const RuleSet* rules, std::size_t* fuel, std::vector<RewriteStep>* log)
    : rules_(rules), fuel_(fuel), log_(log) {}

bool Rewriter::spend() {
  if (*fuel_ == 0) return false;
  --*fuel_;
  return true;
}

std::string Rewriter::position() const {
  if (path_.empty()) return "ε";
  std::string s;
  for (const auto& p : path_) {
    if (!s.empty()) s += '.';
    s += p;
  }
  return s;
}

void Rewriter::record(const std::string& axiom, const Term& before, const Term& after) {
  if (log_ && log_->size() < kMaxLoggedSteps) log_->push_back(RewriteStep{position(), axiom, before, after});
}

std::pair<std::string, Term> Rewriter::rename_lambda(const std::string& x, const Term& body) {
  if (!rules_ || !rules_->vars.lambda.contains(x)) return {x, body};
  std::string fresh = fresh_name_avoiding(x, [&](const std::string& n) {
    return rules_->vars.lambda.contains(n) || body->fv.lambda.contains(n);
  });
  return {fresh, subst(body, LambdaSubst{x, mk::var(fresh)})};
}

Value Rewriter::value(const Value& v) {
  struct Guard {
    std::vector<std::string>& p;
    Guard(std::vector<std::string>& p, std::string s) : p(p) { p.push_back(std::move(s)); }
    ~Guard() { p.pop_back(); }
  };
  return std::visit(
      overloaded{[&](const LambdaVar& x) -> Value {
                   if (!rules_) return v;
                   auto it = rules_->lambda_rules.find(x.name);
                   if (it == rules_->lambda_rules.end() || !spend()) return v;
                   record("hypothesis", mk::val(v), mk::val(it->second));
                   return value(it->second);
                 },
                 [&](const Lambda& l) -> Value {
                   auto [x, body] = rename_lambda(l.param, l.body);
                   Guard g(path_, "body");
                   Term b = term(body);
                   if (b == l.body) return v;
                   return mk::lam(x, b);
                 },
                 [&](const Ctor& c) -> Value {
                   Guard g(path_, "payload");
                   Value p = value(c.payload);
                   if (p == c.payload) return v;
                   return mk::ctor(c.name, p);
                 },
                 [&](const Record& r) -> Value {
                   bool changed = false;
                   std::map<std::string, Value> f;
                   for (const auto& [l, w] : r.fields) {
                     Guard g(path_, l);
                     Value w2 = value(w);
                     changed |= w2 != w;
                     f.emplace(l, w2);
                   }
                   return changed ? mk::record(std::move(f)) : v;
                 },
                 [&](const Scissors&) -> Value { return v; }},
      v->node);
}

Stack Rewriter::stack(const Stack& s) {
  return std::visit(overloaded{[&](const StackVar&) -> Stack { return s; },
                               [&](const Push& p) -> Stack {
                                 Value h = value(p.head);
                                 Stack t = stack(p.tail);
                                 if (h == p.head && t == p.tail) return s;
                                 return mk::push(h, t);
                               },
                               [&](const Frame& f) -> Stack {
                                 Term h = term(f.fun);
                                 Stack t = stack(f.tail);
                                 if (h == f.fun && t == f.tail) return s;
                                 return mk::frame(h, t);
                               }},
                    s->node);
}

Term Rewriter::children(const Term& t) {
  auto sub = [&](const char* label, const Term& x) {
    path_.push_back(label);
    Term r = term(x);
    path_.pop_back();
    return r;
  };
  auto subv = [&](const char* label, const Value& x) {
    path_.push_back(label);
    Value r = value(x);
    path_.pop_back();
    return r;
  };
  return std::visit(
      overloaded{[&](const Val& x) -> Term {
                   Value v = value(x.value);
                   return v == x.value ? t : mk::val(v);
                 },
                 [&](const TermVar&) -> Term { return t; },
                 [&](const App& a) -> Term {
                   Term f = sub("fun", a.fun);
                   Term u = sub("arg", a.arg);
                   if (f == a.fun && u == a.arg) return t;
                   return mk::app(f, u);
                 },
                 [&](const Mu& m) -> Term {
                   std::string alpha = m.var;
                   Term body = m.body;
                   if (rules_ && rules_->vars.mu.contains(alpha)) {
                     std::string fresh = fresh_name_avoiding(alpha, [&](const std::string& n) {
                       return rules_->vars.mu.contains(n) || body->fv.mu.contains(n);
                     });
                     body = subst(body, StackSubst{alpha, mk::svar(fresh)});
                     alpha = fresh;
                   }
                   Term b = sub("body", body);
                   if (b == m.body) return t;
                   return mk::mu(alpha, b);
                 },
                 [&](const Proc& p) -> Term {
                   Term x = sub("process", p.process.term);
                   path_.push_back("stack");
                   Stack s = stack(p.process.stack);
                   path_.pop_back();
                   if (x == p.process.term && s == p.process.stack) return t;
                   return mk::proc(x, s);
                 },
                 [&](const Proj& p) -> Term {
                   Value v = subv("record", p.record);
                   return v == p.record ? t : mk::proj(v, p.label);
                 },
                 [&](const Case& c) -> Term {
                   Value v = subv("scrutinee", c.scrutinee);
                   bool changed = v != c.scrutinee;
                   std::map<std::string, Branch> bs;
                   for (const auto& [k, b] : c.branches) {
                     auto [x, body] = rename_lambda(b.var, b.body);
                     path_.push_back(k);
                     Term nb = term(body);
                     path_.pop_back();
                     changed |= nb != b.body;
                     bs.emplace(k, Branch{x, nb});
                   }
                   return changed ? mk::case_of(v, std::move(bs)) : t;
                 },
                 [&](const Delta& d) -> Term {
                   Value l = subv("left", d.left);
                   Value r = subv("right", d.right);
                   if (l == d.left && r == d.right) return t;
                   return mk::delta(l, r);
                 },
                 [&](const UnitProbe& u) -> Term {
                   Value v = subv("arg", u.arg);
                   return v == u.arg ? t : mk::unit_probe(v);
                 }},
      t->node);
}

namespace {

// Head position of a term once its leading lambdas have been stripped.
// Returns false when evaluation would block on a variable there.
bool head_progresses(const Term& t) {
  if (auto* c = as<Case>(t)) return !as<LambdaVar>(c->scrutinee);
  if (auto* p = as<Proj>(t)) return !as<LambdaVar>(p->record);
  if (auto* u = as<UnitProbe>(t)) return !as<LambdaVar>(u->arg);
  return true;
}

}  // namespace

std::optional<Term> Rewriter::unfold(const Term& t) {
  if (!rules_ || rules_->recursive.empty()) return std::nullopt;
  std::vector<Term> args;
  Term head = t;
  while (auto* a = as<App>(head)) {
    if (!is_value(a->arg)) return std::nullopt;
    args.push_back(a->arg);
    head = a->fun;
  }
  if (args.empty() || !is_value(head)) return std::nullopt;
  auto* f = as<LambdaVar>(value_of(head));
  if (!f) return std::nullopt;
  auto it = rules_->recursive.find(f->name);
  if (it == rules_->recursive.end()) return std::nullopt;
  std::reverse(args.begin(), args.end());

  Value def = it->second;
  Term body = mk::val(def);
  std::size_t used = 0;
  while (used < args.size()) {
    auto* l = is_value(body) ? as<Lambda>(value_of(body)) : nullptr;
    if (!l) break;
    body = subst(l->body, LambdaSubst{l->param, value_of(args[used])});
    ++used;
  }
  if (used == args.size()) {
    while (is_value(body)) {
      auto* l = as<Lambda>(value_of(body));
      if (!l) break;
      body = l->body;
    }
    if (!head_progresses(body)) return std::nullopt;
  }
  return mk::apps(mk::val(def), args);
}

std::optional<std::pair<Term, std::string>> Rewriter::top(const Term& t) {
  if (rules_) {
    if (auto* a = as<TermVar>(t)) {
      auto it = rules_->term_rules.find(a->name);
      if (it != rules_->term_rules.end()) return std::pair{it->second, std::string("hypothesis")};
      return std::nullopt;
    }
    if (!is_value(t) && !rules_->whole.empty()) {
      auto it = rules_->whole.find(canonical_key(t));
      if (it != rules_->whole.end()) return std::pair{mk::val(it->second.second), std::string("hypothesis")};
    }
  }
  if (auto* a = as<App>(t)) {
    if (is_value(a->fun) && is_value(a->arg)) {
      if (auto* l = as<Lambda>(value_of(a->fun)))
        return std::pair{subst(l->body, LambdaSubst{l->param, value_of(a->arg)}), std::string("beta")};
    }
    if (auto u = unfold(t)) {
      const auto* h = as<App>(t);
      while (as<App>(h->fun)) h = as<App>(h->fun);
      return std::pair{*u, "unfold " + std::get<LambdaVar>(value_of(h->fun)->node).name};
    }
    return std::nullopt;
  }
  if (auto* p = as<Proj>(t)) {
    if (auto* r = as<Record>(p->record)) {
      auto it = r->fields.find(p->label);
      if (it != r->fields.end()) return std::pair{mk::val(it->second), std::string("projection")};
    }
    return std::nullopt;
  }
  if (auto* c = as<Case>(t)) {
    if (auto* k = as<Ctor>(c->scrutinee)) {
      auto it = c->branches.find(k->name);
      if (it != c->branches.end())
        return std::pair{subst(it->second.body, LambdaSubst{it->second.var, k->payload}), std::string("case")};
    }
  }
  return std::nullopt;
}

Term Rewriter::term(const Term& t) {
  if (depth_ >= kMaxRewriteDepth) return t;
  struct Nest {
    int& d;
    explicit Nest(int& d) : d(++d) {}
    ~Nest() { --d; }
  } nest(depth_);
  Term cur = t;
  for (;;) {
    cur = children(cur);
    if (*fuel_ == 0) return cur;
    auto next = top(cur);
    if (!next) return cur;
    if (alpha_eq(next->first, cur)) {
      // Rewrites to itself: no normal form.
      *fuel_ = 0;
      return cur;
    }
    if (!spend()) return cur;
    record(next->second, cur, next->first);
    cur = next->first;
  }
}

Normalized normalize_traced(const Term& t, std::size_t fuel) {
  Normalized out;
  std::size_t budget = fuel;
  Rewriter rw(nullptr, &budget, &out.steps);
  out.term = rw.term(t);
  out.out_of_fuel = budget == 0;
  return out;
}

Term normalize(const Term& t, std::size_t fuel) {
  std::size_t budget = fuel;
  Rewriter rw(nullptr, &budget, nullptr);
  return rw.term(t);
}

}  // namespace svr
