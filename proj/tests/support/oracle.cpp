#include "oracle.hpp"

#include <map>

namespace svrtest {

using namespace svr;

std::string shape_name(Shape s) {
  switch (s) {
    case Shape::Reduces: return "reduces";
    case Shape::Final: return "final";
    case Shape::Stuck: return "stuck";
    case Shape::DeltaLike: return "delta-like";
    case Shape::OpenLambda: return "open-lambda";
    case Shape::OpenTerm: return "open-term";
    case Shape::Scissors: return "scissors";
  }
  return "?";
}

namespace {

Expected reduces(const char* rule) { return {Shape::Reduces, rule}; }
Expected blocked(Shape s) { return {s, ""}; }

enum class Head { Var, Lambda, Ctor, Record, Scissors };

Head head(const Value& v) {
  if (as<LambdaVar>(v)) return Head::Var;
  if (as<Lambda>(v)) return Head::Lambda;
  if (as<Ctor>(v)) return Head::Ctor;
  if (as<Record>(v)) return Head::Record;
  return Head::Scissors;
}

}  // namespace

Expected expected_step(const Process& p, bool delta_fires) {
  const Term& t = p.term;
  const Stack& s = p.stack;
  if (as<TermVar>(t)) return blocked(Shape::OpenTerm);
  if (as<App>(t)) return reduces("push");
  if (as<Mu>(t)) return reduces("capture");
  if (as<Proc>(t)) return reduces("restart");
  if (auto* d = as<Delta>(t)) {
    (void)d;
    return delta_fires ? reduces("delta") : blocked(Shape::DeltaLike);
  }
  if (auto* u = as<UnitProbe>(t)) {
    Head h = head(u->arg);
    if (h == Head::Scissors) return blocked(Shape::Scissors);
    if (h == Head::Var) return blocked(Shape::OpenLambda);
    if (h == Head::Record && std::get<Record>(u->arg->node).fields.empty()) return reduces("unit");
    return blocked(Shape::Stuck);
  }
  if (auto* q = as<Proj>(t)) {
    Head h = head(q->record);
    if (h == Head::Scissors) return blocked(Shape::Scissors);
    if (h == Head::Var) return blocked(Shape::OpenLambda);
    if (h != Head::Record) return blocked(Shape::Stuck);
    const auto& fields = std::get<Record>(q->record->node).fields;
    return fields.count(q->label) ? reduces("project") : blocked(Shape::Stuck);
  }
  if (auto* c = as<Case>(t)) {
    Head h = head(c->scrutinee);
    if (h == Head::Scissors) return blocked(Shape::Scissors);
    if (h == Head::Var) return blocked(Shape::OpenLambda);
    if (h != Head::Ctor) return blocked(Shape::Stuck);
    return c->branches.count(std::get<Ctor>(c->scrutinee->node).name) ? reduces("case") : blocked(Shape::Stuck);
  }
  // A value.
  const Value& v = std::get<Val>(t->node).value;
  Head h = head(v);
  if (h == Head::Scissors) return blocked(Shape::Scissors);
  if (as<StackVar>(s)) return blocked(Shape::Final);
  if (as<Frame>(s)) return reduces("pop");
  if (h == Head::Lambda) return reduces("beta");
  if (h == Head::Var) return blocked(Shape::OpenLambda);
  return blocked(Shape::Stuck);
}

Expected observed_step(const StepResult& r) {
  if (auto* n = std::get_if<Next>(&r)) return {Shape::Reduces, rule_name(n->rule)};
  const auto& cls = std::get<Blocked>(r).cls;
  if (std::holds_alternative<Final>(cls)) return blocked(Shape::Final);
  if (std::holds_alternative<Stuck>(cls)) return blocked(Shape::Stuck);
  if (std::holds_alternative<DeltaLike>(cls)) return blocked(Shape::DeltaLike);
  if (std::holds_alternative<OpenLambdaVar>(cls)) return blocked(Shape::OpenLambda);
  if (std::holds_alternative<OpenTermVar>(cls)) return blocked(Shape::OpenTerm);
  return blocked(Shape::Scissors);
}

Value subst_closed(const Value& w, const std::string& x, const Value& v) {
  if (auto* y = as<LambdaVar>(w)) return y->name == x ? v : w;
  if (auto* l = as<Lambda>(w)) return l->param == x ? w : mk::lam(l->param, subst_closed(l->body, x, v));
  if (auto* c = as<Ctor>(w)) return mk::ctor(c->name, subst_closed(c->payload, x, v));
  if (auto* r = as<Record>(w)) {
    std::map<std::string, Value> f;
    for (const auto& [l, u] : r->fields) f.emplace(l, subst_closed(u, x, v));
    return mk::record(std::move(f));
  }
  return w;
}

namespace {

Term subst_term(const Term& t, const std::string& x, const Value& v) { return subst_closed(t, x, v); }

Stack subst_stack(const Stack& s, const std::string& x, const Value& v) {
  if (auto* p = as<Push>(s)) return mk::push(subst_closed(p->head, x, v), subst_stack(p->tail, x, v));
  if (auto* f = as<Frame>(s)) return mk::frame(subst_term(f->fun, x, v), subst_stack(f->tail, x, v));
  return s;
}

}  // namespace

Term subst_closed(const Term& t, const std::string& x, const Value& v) {
  if (auto* a = as<Val>(t)) return mk::val(subst_closed(a->value, x, v));
  if (auto* a = as<App>(t)) return mk::app(subst_closed(a->fun, x, v), subst_closed(a->arg, x, v));
  if (auto* m = as<Mu>(t)) return mk::mu(m->var, subst_closed(m->body, x, v));
  if (auto* p = as<Proc>(t))
    return mk::proc(subst_closed(p->process.term, x, v), subst_stack(p->process.stack, x, v));
  if (auto* p = as<Proj>(t)) return mk::proj(subst_closed(p->record, x, v), p->label);
  if (auto* c = as<Case>(t)) {
    std::map<std::string, Branch> bs;
    for (const auto& [k, b] : c->branches)
      bs.emplace(k, Branch{b.var, b.var == x ? b.body : subst_closed(b.body, x, v)});
    return mk::case_of(subst_closed(c->scrutinee, x, v), std::move(bs));
  }
  if (auto* d = as<Delta>(t)) return mk::delta(subst_closed(d->left, x, v), subst_closed(d->right, x, v));
  if (auto* u = as<UnitProbe>(t)) return mk::unit_probe(subst_closed(u->arg, x, v));
  return t;
}

namespace {

struct Element {
  bool push;
  Value value;
  Term fun;
};

std::vector<Element> probe_elements() {
  auto x = [] { return mk::val(mk::var("p")); };
  std::vector<Element> out;
  for (const Value& v : {mk::unit(), mk::ctor("A"), mk::ctor("B"), mk::record({{"l", mk::unit()}}),
                         mk::record({{"k", mk::unit()}}), mk::lam("q", mk::val(mk::var("q"))),
                         mk::lam("q", mk::val(mk::unit()))})
    out.push_back({true, v, nullptr});
  std::vector<Term> funs{
      mk::proj(mk::var("p"), "l"),
      mk::proj(mk::var("p"), "k"),
      mk::case_of(mk::var("p"), {{"A", Branch{"q", mk::val(mk::unit())}}}),
      mk::case_of(mk::var("p"), {{"B", Branch{"q", mk::val(mk::unit())}}}),
      mk::app(x(), mk::val(mk::unit())),
      mk::case_of(mk::var("p"), {{"A", Branch{"q", mk::val(mk::var("q"))}}, {"B", Branch{"q", mk::val(mk::var("q"))}}}),
  };
  for (const auto& f : funs) out.push_back({false, nullptr, mk::val(mk::lam("p", f))});
  return out;
}

// A term that converges exactly when the value bound to `p` has at least the
// constructors and fields of `d`.
Term matcher(const Value& d, const std::string& p, int& fresh) {
  if (auto* c = as<Ctor>(d)) {
    std::string q = "m" + std::to_string(fresh++);
    return mk::case_of(mk::var(p), {{c->name, Branch{q, matcher(c->payload, q, fresh)}}});
  }
  if (auto* r = as<Record>(d)) {
    Term out = mk::val(mk::unit());
    for (const auto& [l, v] : r->fields) {
      std::string q = "m" + std::to_string(fresh++);
      Term check = mk::app(mk::val(mk::lam(q, matcher(v, q, fresh))), mk::proj(mk::var(p), l));
      out = mk::app(mk::val(mk::lam("m" + std::to_string(fresh++), out)), check);
    }
    return out;
  }
  return mk::val(mk::unit());
}

bool closed_data(const Value& v) {
  if (auto* c = as<Ctor>(v)) return closed_data(c->payload);
  if (auto* r = as<Record>(v)) {
    for (const auto& [l, w] : r->fields)
      if (!closed_data(w)) return false;
    return true;
  }
  return false;
}

void collect_data(const Term& t, std::map<std::string, Value>& out);

void collect_data(const Value& v, std::map<std::string, Value>& out) {
  if (closed_data(v)) out.emplace(to_string(v), v);
  if (auto* l = as<Lambda>(v)) collect_data(l->body, out);
  if (auto* c = as<Ctor>(v)) collect_data(c->payload, out);
  if (auto* r = as<Record>(v))
    for (const auto& [l, w] : r->fields) collect_data(w, out);
}

void collect_data(const Term& t, std::map<std::string, Value>& out) {
  if (auto* a = as<Val>(t)) collect_data(a->value, out);
  if (auto* a = as<App>(t)) {
    collect_data(a->fun, out);
    collect_data(a->arg, out);
  }
  if (auto* m = as<Mu>(t)) collect_data(m->body, out);
  if (auto* p = as<Proc>(t)) collect_data(p->process.term, out);
  if (auto* c = as<Case>(t))
    for (const auto& [k, b] : c->branches) collect_data(b.body, out);
}

bool converges(const Term& t, const Stack& s, std::size_t fuel) {
  return std::holds_alternative<Converged>(run(Process{t, s}, fuel));
}

}  // namespace

ProbeResult exhaustive_probe(const Term& lhs, const Term& rhs, int depth, std::size_t fuel) {
  std::vector<Element> elems = probe_elements();
  std::map<std::string, Value> data;
  collect_data(lhs, data);
  collect_data(rhs, data);
  for (const auto& [k, d] : data) {
    if (!as<Ctor>(d) && !as<Record>(d)) continue;
    int fresh = 0;
    elems.push_back({false, nullptr, mk::val(mk::lam("p", matcher(d, "p", fresh)))});
  }
  ProbeResult out;
  std::vector<Stack> layer{mk::svar("π")};
  for (int d = 0; d <= depth; ++d) {
    std::vector<Stack> next;
    for (const auto& s : layer) {
      ++out.probes;
      if (converges(lhs, s, fuel) != converges(rhs, s, fuel)) {
        out.distinguished = true;
        out.stack = to_string(s);
        return out;
      }
      if (d == depth) continue;
      // The new element goes on top: it is consumed first.
      for (const auto& e : elems) next.push_back(e.push ? mk::push(e.value, s) : mk::frame(e.fun, s));
    }
    layer = std::move(next);
  }
  return out;
}

}  // namespace svrtest
