#include <algorithm>
#include <set>

#include "svr/equivalence.hpp"
#include "util.hpp"

namespace svr {

Term omega() {
  Value w = mk::lam("x", mk::app(mk::val(mk::var("x")), mk::val(mk::var("x"))));
  return mk::app(mk::val(w), mk::val(w));
}

namespace {

struct Names {
  std::set<std::string> ctors;
  std::set<std::string> labels;
};

void collect(const Value& v, Names& n);
void collect(const Stack& s, Names& n);

void collect(const Term& t, Names& n) {
  std::visit(overloaded{[&](const Val& v) { collect(v.value, n); },
                        [&](const TermVar&) {},
                        [&](const App& a) {
                          collect(a.fun, n);
                          collect(a.arg, n);
                        },
                        [&](const Mu& m) { collect(m.body, n); },
                        [&](const Proc& p) {
                          collect(p.process.term, n);
                          collect(p.process.stack, n);
                        },
                        [&](const Proj& p) {
                          n.labels.insert(p.label);
                          collect(p.record, n);
                        },
                        [&](const Case& c) {
                          collect(c.scrutinee, n);
                          for (const auto& [k, b] : c.branches) {
                            n.ctors.insert(k);
                            collect(b.body, n);
                          }
                        },
                        [&](const Delta& d) {
                          collect(d.left, n);
                          collect(d.right, n);
                        },
                        [&](const UnitProbe& u) { collect(u.arg, n); }},
             t->node);
}

void collect(const Value& v, Names& n) {
  std::visit(overloaded{[&](const Lambda& l) { collect(l.body, n); },
                        [&](const Ctor& c) {
                          n.ctors.insert(c.name);
                          collect(c.payload, n);
                        },
                        [&](const Record& r) {
                          for (const auto& [l, w] : r.fields) {
                            n.labels.insert(l);
                            collect(w, n);
                          }
                        },
                        [](const auto&) {}},
             v->node);
}

void collect(const Stack& s, Names& n) {
  std::visit(overloaded{[](const StackVar&) {},
                        [&](const Push& p) {
                          collect(p.head, n);
                          collect(p.tail, n);
                        },
                        [&](const Frame& f) {
                          collect(f.fun, n);
                          collect(f.tail, n);
                        }},
             s->node);
}

// Closed values of exactly the given size.
std::vector<Value> closed_values_of_size(const Names& n, int size) {
  std::vector<Value> out;
  if (size == 1) {
    out.push_back(mk::unit());
    return out;
  }
  if (size == 2) {
    out.push_back(mk::lam("x", mk::val(mk::var("x"))));
    out.push_back(mk::lam("x", mk::val(mk::unit())));
  }
  for (const Value& v : closed_values_of_size(n, size - 1)) {
    for (const auto& c : n.ctors) out.push_back(mk::ctor(c, v));
    for (const auto& l : n.labels) out.push_back(mk::record({{l, v}}));
  }
  if (n.labels.size() >= 2 && size >= 3) {
    std::vector<std::string> ls(n.labels.begin(), n.labels.end());
    for (int a = 1; a + 1 < size; ++a) {
      int b = size - 1 - a;
      for (const Value& va : closed_values_of_size(n, a))
        for (const Value& vb : closed_values_of_size(n, b))
          out.push_back(mk::record({{ls[0], va}, {ls[1], vb}}));
    }
  }
  return out;
}

}  // namespace

ProbeAlphabet probe_alphabet(const Term& lhs, const Term& rhs, const Budget& budget) {
  Names n;
  collect(lhs, n);
  collect(rhs, n);
  if (n.ctors.empty()) n.ctors.insert("C");
  if (n.labels.empty()) n.labels.insert("l");

  ProbeAlphabet a;
  a.push_values.push_back(mk::unit());
  for (const auto& c : n.ctors) a.push_values.push_back(mk::ctor(c));
  for (const auto& l : n.labels) a.push_values.push_back(mk::record({{l, mk::unit()}}));
  a.push_values.push_back(mk::lam("x", mk::val(mk::var("x"))));

  auto x = mk::var("x");
  auto y = [] { return mk::val(mk::var("y")); };
  for (const auto& l : n.labels) a.probes.push_back(mk::val(mk::lam("x", mk::proj(x, l))));
  for (const auto& c : n.ctors)
    a.probes.push_back(mk::val(mk::lam("x", mk::case_of(x, {{c, Branch{"y", y()}}}))));
  a.probes.push_back(mk::val(mk::lam("x", mk::unit_probe(x))));
  a.probes.push_back(mk::val(mk::lam("x", mk::app(mk::val(x), mk::val(mk::unit())))));
  for (const auto& c : n.ctors)
    for (const auto& d : n.ctors)
      if (c != d)
        a.probes.push_back(
            mk::val(mk::lam("x", mk::case_of(x, {{c, Branch{"y", y()}}, {d, Branch{"y", omega()}}}))));

  for (int s = 1; s <= std::max(1, budget.subst_size); ++s)
    for (auto& v : closed_values_of_size(n, s)) a.closed_values.push_back(std::move(v));
  return a;
}

std::vector<Stack> stack_contexts(const ProbeAlphabet& a, int depth, const std::string& bottom) {
  std::vector<Stack> out{mk::svar(bottom)};
  std::vector<Stack> layer = out;
  for (int d = 1; d <= depth; ++d) {
    std::vector<Stack> next;
    for (const Stack& tail : layer) {
      for (const Term& p : a.probes) next.push_back(mk::frame(p, tail));
      for (const Value& v : a.push_values) next.push_back(mk::push(v, tail));
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

namespace {

constexpr std::size_t kMaxSubstitutions = 512;
constexpr std::size_t kTraceCap = 400;

std::vector<std::vector<std::pair<std::string, Term>>> substitutions(const VarSets& fv, const ProbeAlphabet& a) {
  std::vector<std::pair<std::string, bool>> vars;
  for (const auto& x : fv.lambda) vars.emplace_back(x, true);
  for (const auto& x : fv.term) vars.emplace_back(x, false);
  std::vector<std::vector<std::pair<std::string, Term>>> out{{}};
  for (const auto& [name, is_lambda] : vars) {
    std::vector<std::vector<std::pair<std::string, Term>>> next;
    for (const auto& partial : out) {
      for (const Value& v : a.closed_values) {
        auto s = partial;
        s.emplace_back(name, mk::val(v));
        next.push_back(std::move(s));
        if (next.size() >= kMaxSubstitutions) break;
      }
      if (next.size() >= kMaxSubstitutions) break;
    }
    out = std::move(next);
  }
  return out;
}

Term close_term(Term t, const VarSets& fv, const std::vector<std::pair<std::string, Term>>& s,
                const std::string& bottom) {
  for (const auto& [x, u] : s) {
    if (fv.lambda.contains(x))
      t = subst(t, LambdaSubst{x, value_of(u)});
    else
      t = subst(t, TermSubst{x, u});
  }
  for (const auto& a : fv.mu) t = subst(t, StackSubst{a, mk::svar(bottom)});
  return t;
}

bool definitely_blocked(const RunOutcome& r) {
  auto* h = std::get_if<Halted>(&r);
  if (!h) return false;
  return std::holds_alternative<Stuck>(h->cls) || std::holds_alternative<ScissorsHit>(h->cls);
}

}  // namespace

std::optional<Witness> search_inequivalence(const Term& lhs, const Term& rhs, const Budget& budget) {
  const std::string bottom = "α";
  ProbeAlphabet a = probe_alphabet(lhs, rhs, budget);
  VarSets fv = lhs->fv;
  fv.merge(rhs->fv);
  fv.mu.erase(bottom);
  auto substs = substitutions(fv, a);
  bool pure = delta_free(lhs) && delta_free(rhs);
  SearchOracle search_oracle(budget, budget.delta_index);
  const EquivOracle& oracle = pure ? null_oracle() : static_cast<const EquivOracle&>(search_oracle);

  std::optional<Witness> suspected;
  for (const Stack& ctx : stack_contexts(a, budget.depth, bottom)) {
    for (const auto& s : substs) {
      Process pl{close_term(lhs, fv, s, bottom), ctx};
      Process pr{close_term(rhs, fv, s, bottom), ctx};
      RunOutcome rl = run(pl, budget.fuel, oracle);
      RunOutcome rr = run(pr, budget.fuel, oracle);
      bool cl = std::holds_alternative<Converged>(rl);
      bool cr = std::holds_alternative<Converged>(rr);
      if (cl == cr) continue;
      bool sound = definitely_blocked(cl ? rr : rl);
      if (!sound && suspected) continue;
      Witness w;
      w.context = ctx;
      w.substitution = s;
      w.left_converges = cl;
      w.sound = sound;
      w.left_trace = trace_with_rules(pl, std::min(budget.fuel, kTraceCap), oracle);
      w.right_trace = trace_with_rules(pr, std::min(budget.fuel, kTraceCap), oracle);
      if (sound) return w;
      suspected = std::move(w);
    }
  }
  return suspected;
}

SearchOracle::SearchOracle(Budget budget, int index) : budget_(budget), index_(index) {}

OracleAnswer SearchOracle::query(const Value& v, const Value& w) const {
  if (index_ <= 0) return OracleAnswer::NotKnownInequivalent;
  std::string key = canonical_key(v) + "|" + canonical_key(w);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  Budget b = budget_;
  b.delta_index = index_ - 1;
  auto wit = search_inequivalence(mk::val(v), mk::val(w), b);
  OracleAnswer ans = wit && wit->sound ? OracleAnswer::DefinitelyInequivalent : OracleAnswer::NotKnownInequivalent;
  cache_.emplace(std::move(key), ans);
  return ans;
}

}  // namespace svr
