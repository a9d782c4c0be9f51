#include "gen.hpp"

#include <algorithm>

#include "svr/machine.hpp"

namespace svrtest {

using namespace svr;

namespace {

// Ordered splits of `total` into `parts` sizes, each at least 1.
void splits(int total, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (parts == 0) {
    if (total == 0) out.push_back(cur);
    return;
  }
  for (int s = 1; s <= total - (parts - 1); ++s) {
    cur.push_back(s);
    splits(total - s, parts - 1, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> splits(int total, int parts) {
  std::vector<int> cur;
  std::vector<std::vector<int>> out;
  splits(total, parts, cur, out);
  return out;
}

}  // namespace

void Enumerator::grow(int n) {
  while (static_cast<int>(values_.size()) <= n) {
    int m = static_cast<int>(values_.size());
    std::vector<Value> vs;
    std::vector<Term> ts;
    std::vector<Stack> ss;
    if (m == 1) {
      vs = {mk::var("x"), mk::unit(), mk::scissors()};
      ts.push_back(mk::tvar("a"));
      ss.push_back(mk::svar("α"));
    }
    if (m >= 2) {
      for (const auto& t : terms(m - 1)) vs.push_back(mk::lam("x", t));
      for (const auto& c : kCtors)
        for (const auto& v : values(m - 1)) vs.push_back(mk::ctor(c, v));
      for (const auto& l : kLabels)
        for (const auto& v : values(m - 1)) vs.push_back(mk::record({{l, v}}));
      for (const auto& sp : splits(m - 1, 2))
        for (const auto& v : values(sp[0]))
          for (const auto& w : values(sp[1])) vs.push_back(mk::record({{"k", v}, {"l", w}}));

      for (const auto& sp : splits(m - 1, 2))
        for (const auto& f : terms(sp[0]))
          for (const auto& u : terms(sp[1])) ts.push_back(mk::app(f, u));
      for (const auto& t : terms(m - 1)) ts.push_back(mk::mu("α", t));
      for (const auto& sp : splits(m - 1, 2))
        for (const auto& t : terms(sp[0]))
          for (const auto& s : stacks(sp[1])) ts.push_back(mk::proc(t, s));
      for (const auto& l : kLabels)
        for (const auto& v : values(m - 1)) ts.push_back(mk::proj(v, l));
      for (const auto& c : kCtors)
        for (const auto& sp : splits(m - 1, 2))
          for (const auto& v : values(sp[0]))
            for (const auto& b : terms(sp[1])) ts.push_back(mk::case_of(v, {{c, Branch{"x", b}}}));
      for (const auto& sp : splits(m - 1, 3))
        for (const auto& v : values(sp[0]))
          for (const auto& b1 : terms(sp[1]))
            for (const auto& b2 : terms(sp[2]))
              ts.push_back(mk::case_of(v, {{"A", Branch{"x", b1}}, {"B", Branch{"x", b2}}}));
      if (internal_) {
        for (const auto& sp : splits(m - 1, 2))
          for (const auto& v : values(sp[0]))
            for (const auto& w : values(sp[1])) ts.push_back(mk::delta(v, w));
        for (const auto& v : values(m - 1)) ts.push_back(mk::unit_probe(v));
      }

      for (const auto& sp : splits(m - 1, 2)) {
        for (const auto& v : values(sp[0]))
          for (const auto& s : stacks(sp[1])) ss.push_back(mk::push(v, s));
        for (const auto& t : terms(sp[0]))
          for (const auto& s : stacks(sp[1])) ss.push_back(mk::frame(t, s));
      }
    }
    for (const auto& v : vs) ts.push_back(mk::val(v));
    values_.push_back(std::move(vs));
    terms_.push_back(std::move(ts));
    stacks_.push_back(std::move(ss));
  }
}

const std::vector<Value>& Enumerator::values(int n) {
  grow(n);
  return values_[n];
}
const std::vector<Term>& Enumerator::terms(int n) {
  grow(n);
  return terms_[n];
}
const std::vector<Stack>& Enumerator::stacks(int n) {
  grow(n);
  return stacks_[n];
}

std::vector<Process> Enumerator::processes(int max_size) {
  std::vector<Process> out;
  for (int total = 2; total <= max_size; ++total)
    for (int ts = 1; ts < total; ++ts)
      for (const auto& t : terms(ts))
        for (const auto& s : stacks(total - ts)) out.push_back(Process{t, s});
  return out;
}

// ---------------------------------------------------------------------------

std::string Random::fresh_var(const std::vector<std::string>& vars) {
  static const std::vector<std::string> pool{"x", "y", "z", "w", "u", "v"};
  for (const auto& p : pool)
    if (std::find(vars.begin(), vars.end(), p) == vars.end()) return p;
  return "x" + std::to_string(vars.size());
}

Value Random::data(int depth) {
  if (depth <= 0 || chance(30)) return mk::unit();
  if (chance(70)) return mk::ctor(ctor(), data(depth - 1));
  if (chance(50)) return mk::record({{label(), data(depth - 1)}});
  return mk::record({{"k", data(depth - 1)}, {"l", data(depth - 1)}});
}

Value Random::value(int depth, const std::vector<std::string>& vars) {
  int pick = below(depth <= 0 ? 2 : 6);
  if (pick == 0 && !vars.empty()) return mk::var(vars[below(static_cast<int>(vars.size()))]);
  if (pick <= 1) return chance(50) ? mk::unit() : mk::ctor(ctor());
  if (pick == 2) return mk::ctor(ctor(), value(depth - 1, vars));
  if (pick == 3) return mk::record({{label(), value(depth - 1, vars)}});
  std::vector<std::string> inner = vars;
  std::string x = fresh_var(vars);
  inner.push_back(x);
  return mk::lam(x, term(depth - 1, inner));
}

Term Random::term(int depth, const std::vector<std::string>& vars, const std::vector<std::string>& stacks) {
  int pick = below(depth <= 0 ? 1 : 8);
  switch (pick) {
    case 0:
    case 1: return mk::val(value(depth, vars));
    case 2: return mk::app(term(depth - 1, vars, stacks), term(depth - 1, vars, stacks));
    case 3: {
      std::vector<std::string> inner = vars;
      std::string x = fresh_var(vars);
      inner.push_back(x);
      return mk::app(mk::val(mk::lam(x, term(depth - 1, inner, stacks))), mk::val(value(depth - 1, vars)));
    }
    case 4: return mk::proj(chance(60) ? mk::record({{label(), value(depth - 1, vars)}}) : value(depth - 1, vars),
                            label());
    case 5: {
      std::vector<std::string> inner = vars;
      std::string x = fresh_var(vars);
      inner.push_back(x);
      std::map<std::string, Branch> bs;
      for (const auto& c : kCtors)
        if (bs.empty() || chance(60)) bs.emplace(c, Branch{x, term(depth - 1, inner, stacks)});
      Value scrut = chance(70) ? mk::ctor(ctor(), value(depth - 1, vars)) : value(depth - 1, vars);
      return mk::case_of(scrut, std::move(bs));
    }
    case 6: {
      std::string a = "α" + std::to_string(stacks.size());
      std::vector<std::string> inner = stacks;
      inner.push_back(a);
      return mk::mu(a, term(depth - 1, vars, inner));
    }
    default: {
      if (stacks.empty()) return mk::val(value(depth - 1, vars));
      const std::string& a = stacks[below(static_cast<int>(stacks.size()))];
      return mk::proc(term(depth - 1, vars, stacks), mk::svar(a));
    }
  }
}

Stack Random::stack(int depth, const std::vector<std::string>& vars, const std::string& bottom) {
  if (depth <= 0 || chance(30)) return mk::svar(bottom);
  if (chance(50)) return mk::push(value(depth - 1, vars), stack(depth - 1, vars, bottom));
  return mk::frame(term(depth - 1, vars), stack(depth - 1, vars, bottom));
}

Process Random::reducible_process(int depth) {
  for (;;) {
    Process p{term(depth, {"x"}), stack(depth, {"x"})};
    if (std::holds_alternative<Next>(step(p))) return p;
  }
}

std::pair<Term, Term> Random::term_pair(int depth) {
  Term t = term(depth);
  int pick = below(4);
  if (pick == 0) return {t, term(depth)};
  if (pick == 1) {
    // A redex that reduces to t when t is a value, else a wrapper around it.
    if (is_value(t)) {
      switch (below(3)) {
        case 0: return {t, mk::app(mk::val(mk::lam("z", mk::val(mk::var("z")))), t)};
        case 1: return {t, mk::proj(mk::record({{"l", value_of(t)}}), "l")};
        default: return {t, mk::case_of(mk::ctor("A", value_of(t)), {{"A", Branch{"z", mk::val(mk::var("z"))}}})};
      }
    }
    return {t, mk::app(mk::val(mk::lam("z", mk::val(mk::var("z")))), t)};
  }
  if (pick == 2) {
    Value v = data(depth);
    Value w = chance(50) ? data(depth) : mk::ctor(ctor(), v);
    return {mk::val(v), mk::val(w)};
  }
  return {t, t};
}

}  // namespace svrtest
