#include <deque>
#include <set>

#include <fmt/format.h>

#include "rewrite.hpp"
#include "util.hpp"

namespace svr {

std::string verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::Proved: return "proved";
    case VerdictKind::Refuted: return "refuted";
    case VerdictKind::Unknown: return "unknown";
  }
  return "?";
}

std::string polarity_symbol(Polarity p) { return p == Polarity::Equiv ? "≡" : "≢"; }

std::optional<std::string> value_clash(const Value& v, const Value& w) {
  auto kind = [](const Value& x) {
    if (as<Lambda>(x)) return 'L';
    if (as<Ctor>(x)) return 'C';
    if (as<Record>(x)) return 'R';
    if (as<Scissors>(x)) return 'S';
    return 'V';
  };
  char a = kind(v), b = kind(w);
  if (a == 'V' || b == 'V') return std::nullopt;
  if (a > b) {
    std::swap(a, b);
  }
  if (a == b) {
    if (a == 'C' && as<Ctor>(v)->name != as<Ctor>(w)->name) return "constructor-clash";
    if (a == 'R') {
      const auto& f = as<Record>(v)->fields;
      const auto& g = as<Record>(w)->fields;
      bool same = f.size() == g.size() &&
                  std::equal(f.begin(), f.end(), g.begin(), [](const auto& x, const auto& y) { return x.first == y.first; });
      if (!same) return "field-set";
    }
    return std::nullopt;
  }
  if (a == 'C' && b == 'L') return "lambda-vs-constructor";
  if (a == 'L' && b == 'R') return "lambda-vs-record";
  if (a == 'C' && b == 'R') return "constructor-vs-record";
  return "scissors-vs-value";
}

namespace {

using Pair = std::pair<Term, Term>;

// Union-find over subterms with congruence on applications, constructors,
// records, projections and internal instructions. Binders are opaque leaves.
class Congruence {
 public:
  int add(const Term& t) {
    std::string key = canonical_key(t);
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
    Node n;
    n.term = t;
    if (auto* a = as<App>(t)) {
      n.op = "app";
      n.kids = {add(a->fun), add(a->arg)};
    } else if (auto* p = as<Proj>(t)) {
      n.op = "proj:" + p->label;
      n.kids = {add(mk::val(p->record))};
    } else if (auto* d = as<Delta>(t)) {
      n.op = "delta";
      n.kids = {add(mk::val(d->left)), add(mk::val(d->right))};
    } else if (auto* u = as<UnitProbe>(t)) {
      n.op = "unit";
      n.kids = {add(mk::val(u->arg))};
    } else if (is_value(t)) {
      const Value& v = value_of(t);
      if (auto* c = as<Ctor>(v)) {
        n.op = "ctor:" + c->name;
        n.kids = {add(mk::val(c->payload))};
      } else if (auto* r = as<Record>(v)) {
        n.op = "record";
        for (const auto& [l, w] : r->fields) {
          n.op += ":" + l;
          n.kids.push_back(add(mk::val(w)));
        }
      }
    }
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(n));
    parent_.push_back(id);
    ids_.emplace(std::move(key), id);
    return id;
  }

  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  bool merge(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
    return true;
  }

  // Closes under congruence and constructor injectivity.
  void close() {
    for (bool changed = true; changed;) {
      changed = false;
      std::map<std::string, int> sigs;
      for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
        const Node& n = nodes_[i];
        if (n.op.empty()) continue;
        std::string sig = n.op;
        for (int k : n.kids) sig += "," + std::to_string(find(k));
        auto [it, fresh] = sigs.emplace(sig, i);
        if (!fresh) changed |= merge(it->second, i);
      }
      std::map<int, std::vector<int>> classes = members();
      for (auto& [root, ids] : classes) {
        std::map<std::string, int> first;
        for (int id : ids) {
          const Node& b = nodes_[id];
          if (b.op.rfind("ctor:", 0) != 0 && b.op.rfind("record", 0) != 0) continue;
          auto [it, fresh] = first.emplace(b.op, id);
          if (fresh) continue;
          const Node& a = nodes_[it->second];
          for (std::size_t k = 0; k < a.kids.size(); ++k) changed |= merge(a.kids[k], b.kids[k]);
        }
      }
    }
  }

  std::map<int, std::vector<int>> members() {
    std::map<int, std::vector<int>> out;
    for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) out[find(i)].push_back(i);
    return out;
  }

  const Term& term(int i) const { return nodes_[i].term; }

 private:
  struct Node {
    Term term;
    std::string op;
    std::vector<int> kids;
  };
  std::map<std::string, int> ids_;
  std::vector<Node> nodes_;
  std::vector<int> parent_;
};

class Saturation {
 public:
  explicit Saturation(const Budget& budget) : fuel_(budget.fuel) {}

  // A certificate of E ⊢ ⊥, or nothing.
  std::optional<Certificate> run(const EquationalContext& e) {
    if (auto c = saturate(e)) return c;
    return finish();
  }

  // Orients the equations of e into rules; returns a certificate on an immediate clash.
  std::optional<Certificate> saturate(const EquationalContext& e) {
    for (const auto& c : e) {
      if (c.polarity == Polarity::Equiv)
        pending_.emplace_back(c.lhs, c.rhs);
      else
        neqs_.emplace_back(c.lhs, c.rhs);
    }
    std::size_t rounds = 0;
    while (!pending_.empty()) {
      if (++rounds > kMaxRounds) break;
      auto [l0, r0] = pending_.front();
      pending_.pop_front();
      Term l = norm(l0);
      Term r = norm(r0);
      if (alpha_eq(l, r)) continue;
      if (is_value(l) && is_value(r)) {
        const Value& lv = value_of(l);
        const Value& rv = value_of(r);
        if (auto kind = value_clash(lv, rv)) return clash(*kind, l, r);
        if (decompose(lv, rv)) continue;
      }
      if (orient(l, r)) {
        for (auto& p : residual_) pending_.push_back(p);
        residual_.clear();
        continue;
      }
      residual_.emplace_back(l, r);
    }
    return std::nullopt;
  }

  Term norm(const Term& t) {
    Rewriter rw(&rules_, &fuel_, &log_);
    return rw.term(t);
  }

  Certificate clash(const std::string& kind, const Term& l, const Term& r) {
    Certificate c;
    c.chain = log_;
    c.clash = Clash{kind, l, r};
    c.summary = fmt::format("{} between {} and {}", kind, to_string(l), to_string(r));
    return c;
  }

  static constexpr std::size_t kMaxRounds = 20000;

 private:
  bool decompose(const Value& v, const Value& w) {
    if (auto* c = as<Ctor>(v)) {
      auto* d = as<Ctor>(w);
      if (!d || d->name != c->name) return false;
      pending_.emplace_back(mk::val(c->payload), mk::val(d->payload));
      return true;
    }
    if (auto* r = as<Record>(v)) {
      auto* s = as<Record>(w);
      if (!s) return false;
      for (const auto& [l, x] : r->fields) pending_.emplace_back(mk::val(x), mk::val(s->fields.at(l)));
      return true;
    }
    return false;
  }

  static const LambdaVar* lambda_var(const Term& t) { return is_value(t) ? as<LambdaVar>(value_of(t)) : nullptr; }

  void apply_everywhere(const Binding& b) {
    for (auto& [x, v] : rules_.lambda_rules) v = subst(v, b);
    for (auto& [a, t] : rules_.term_rules) t = subst(t, b);
    for (auto& [f, v] : rules_.recursive) v = subst(v, b);
    std::map<std::string, std::pair<Term, Value>> whole;
    for (auto& [k, lr] : rules_.whole) {
      Term l = subst(lr.first, b);
      Value r = subst(lr.second, b);
      if (l != lr.first) {
        pending_.emplace_back(l, mk::val(r));
        continue;
      }
      std::string key = canonical_key(l);
      auto it = whole.find(key);
      if (it != whole.end())
        pending_.emplace_back(mk::val(it->second.second), mk::val(r));
      else
        whole.emplace(key, std::pair{l, r});
    }
    rules_.whole = std::move(whole);
  }

  void add_lambda_rule(const std::string& x, const Value& v) {
    apply_everywhere(LambdaSubst{x, v});
    auto rec = rules_.recursive.find(x);
    if (rec != rules_.recursive.end()) {
      pending_.emplace_back(mk::val(rec->second), mk::val(v));
      rules_.recursive.erase(rec);
    }
    rules_.lambda_rules[x] = v;
    rules_.recompute_vars();
  }

  void add_term_rule(const std::string& a, const Term& t) {
    apply_everywhere(TermSubst{a, t});
    rules_.term_rules[a] = t;
    rules_.recompute_vars();
  }

  // Turns an equation into a rewrite rule when a direction is available.
  bool orient(const Term& l, const Term& r) {
    auto* la = as<TermVar>(l);
    auto* ra = as<TermVar>(r);
    if (la && ra) {
      if (la->name < ra->name)
        add_term_rule(ra->name, l);
      else
        add_term_rule(la->name, r);
      return true;
    }
    if (la && !r->fv.term.contains(la->name)) {
      add_term_rule(la->name, r);
      return true;
    }
    if (ra && !l->fv.term.contains(ra->name)) {
      add_term_rule(ra->name, l);
      return true;
    }
    auto* lx = lambda_var(l);
    auto* rx = lambda_var(r);
    if (lx && rx) {
      bool lrec = rules_.recursive.count(lx->name) > 0;
      bool rrec = rules_.recursive.count(rx->name) > 0;
      bool eliminate_left = lrec == rrec ? lx->name > rx->name : !lrec;
      if (eliminate_left)
        add_lambda_rule(lx->name, value_of(r));
      else
        add_lambda_rule(rx->name, value_of(l));
      return true;
    }
    if (lx && is_value(r)) return orient_var_value(lx->name, value_of(r));
    if (rx && is_value(l)) return orient_var_value(rx->name, value_of(l));
    if (!is_value(l) && is_value(r)) return add_whole(l, value_of(r));
    if (is_value(l) && !is_value(r)) return add_whole(r, value_of(l));
    return false;
  }

  bool orient_var_value(const std::string& x, const Value& v) {
    if (!v->fv.lambda.contains(x)) {
      add_lambda_rule(x, v);
      return true;
    }
    if (!as<Lambda>(v)) return false;
    auto it = rules_.recursive.find(x);
    if (it != rules_.recursive.end()) {
      pending_.emplace_back(mk::val(it->second), mk::val(v));
      return false;
    }
    rules_.recursive.emplace(x, v);
    rules_.recompute_vars();
    return true;
  }

  bool add_whole(const Term& l, const Value& r) {
    std::string key = canonical_key(l);
    auto it = rules_.whole.find(key);
    if (it != rules_.whole.end()) {
      pending_.emplace_back(mk::val(it->second.second), mk::val(r));
      return false;
    }
    rules_.whole.emplace(std::move(key), std::pair{l, r});
    rules_.recompute_vars();
    return true;
  }

  std::optional<Certificate> finish() {
    std::vector<Pair> neqs;
    for (const auto& [l, r] : neqs_) {
      Term nl = norm(l);
      Term nr = norm(r);
      if (alpha_eq(nl, nr)) {
        Certificate c;
        c.chain = log_;
        c.summary = fmt::format("hypothesis {} ≢ {} has equal sides after rewriting", to_string(l), to_string(r));
        return c;
      }
      neqs.emplace_back(nl, nr);
    }

    Congruence cc;
    std::vector<std::pair<int, int>> eqs;
    for (const auto& [l, r] : residual_) eqs.emplace_back(cc.add(l), cc.add(r));
    for (const auto& [k, lr] : rules_.whole) eqs.emplace_back(cc.add(lr.first), cc.add(mk::val(lr.second)));
    for (const auto& [x, v] : rules_.recursive) eqs.emplace_back(cc.add(mk::val(mk::var(x))), cc.add(mk::val(v)));
    std::vector<std::pair<int, int>> diseqs;
    for (const auto& [l, r] : neqs) diseqs.emplace_back(cc.add(l), cc.add(r));
    for (auto [a, b] : eqs) cc.merge(a, b);
    cc.close();

    for (std::size_t i = 0; i < diseqs.size(); ++i) {
      if (cc.find(diseqs[i].first) == cc.find(diseqs[i].second)) {
        Certificate c;
        c.chain = log_;
        c.summary = fmt::format("hypothesis {} ≢ {} merged by congruence", to_string(neqs[i].first),
                                to_string(neqs[i].second));
        return c;
      }
    }
    for (const auto& [root, ids] : cc.members()) {
      for (std::size_t i = 0; i < ids.size(); ++i) {
        const Term& a = cc.term(ids[i]);
        if (!is_value(a)) continue;
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
          const Term& b = cc.term(ids[j]);
          if (!is_value(b)) continue;
          if (auto kind = value_clash(value_of(a), value_of(b))) return clash(*kind, a, b);
        }
      }
    }
    return std::nullopt;
  }

  std::size_t fuel_;
  RuleSet rules_;
  std::vector<RewriteStep> log_;
  std::deque<Pair> pending_;
  std::vector<Pair> residual_;
  std::vector<Pair> neqs_;
};

}  // namespace

std::optional<Term> normalize_in_context(const EquationalContext& e, const Term& t, const Budget& budget) {
  Saturation s(budget);
  if (s.saturate(e)) return std::nullopt;
  return s.norm(t);
}

Verdict context_contradictory(const EquationalContext& e, const Budget& budget) {
  Saturation s(budget);
  if (auto cert = s.run(e)) return Verdict{VerdictKind::Proved, std::move(*cert)};
  return Verdict{};
}

Verdict decide(const EquationalContext& e, const Term& lhs, const Term& rhs, Polarity polarity,
               const Budget& budget) {
  Polarity negated = polarity == Polarity::Equiv ? Polarity::Inequiv : Polarity::Equiv;
  EquationalContext with_negation = e;
  with_negation.push_back(Claim{lhs, rhs, negated});
  if (auto cert = Saturation(budget).run(with_negation)) return Verdict{VerdictKind::Proved, std::move(*cert)};
  EquationalContext with_claim = e;
  with_claim.push_back(Claim{lhs, rhs, polarity});
  if (auto cert = Saturation(budget).run(with_claim)) return Verdict{VerdictKind::Refuted, std::move(*cert)};
  return Verdict{};
}

}  // namespace svr
