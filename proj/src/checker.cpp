#include <functional>
#include <set>

#include <fmt/format.h>

#include "svr/checker.hpp"
#include "util.hpp"

namespace svr {

std::string reason_name(FailureReason r) {
  switch (r) {
    case FailureReason::RuleMismatch: return "rule mismatch";
    case FailureReason::FreshnessViolation: return "freshness violation";
    case FailureReason::EquivalenceUnknown: return "equivalence unknown";
    case FailureReason::EquivalenceRefuted: return "equivalence refuted";
    case FailureReason::ContextInvalid: return "context invalid";
    case FailureReason::AnnotationNeeded: return "annotation needed";
  }
  return "?";
}

std::string to_string(const Judgement& j) {
  const char* turnstile = j.kind == JudgementKind::Value ? "⊩" : "⊢";
  return fmt::format("{} {} {} : {}", to_string(j.context), turnstile, to_string(j.subject), to_string(j.formula));
}

std::string describe(const CheckFailure& f) {
  std::string s = fmt::format("{}: {}\n  in {}", reason_name(f.reason), f.message, to_string(f.judgement));
  if (f.claim)
    s += fmt::format("\n  claim {} {} {}", to_string(f.claim->lhs), polarity_symbol(f.claim->polarity),
                     to_string(f.claim->rhs));
  if (f.cause) s += "\n" + describe(*f.cause);
  return s;
}

std::size_t derivation_size(const Derivation& d) {
  std::size_t n = 1;
  for (const auto& p : d.premises) n += derivation_size(p);
  return n;
}

namespace {

void collect_tags(const Derivation& d, std::vector<std::string>& out) {
  out.push_back(d.rule);
  for (const auto& p : d.premises) collect_tags(p, out);
}

}  // namespace

std::vector<std::string> rule_tags(const Derivation& d) {
  std::vector<std::string> out;
  collect_tags(d, out);
  return out;
}

namespace {

Judgement judge(JudgementKind k, const TypingContext& g, Term s, Formula f) {
  return Judgement{k, g, std::move(s), std::move(f)};
}

CheckResult fail(Judgement j, FailureReason r, std::string msg, std::optional<Claim> claim = std::nullopt) {
  CheckResult res;
  res.failure = CheckFailure{std::move(j), r, std::move(msg), std::move(claim), nullptr};
  return res;
}

CheckResult fail_because(Judgement j, FailureReason r, std::string msg, const CheckResult& cause) {
  CheckResult res = fail(std::move(j), r, std::move(msg));
  res.failure->cause = std::make_shared<CheckFailure>(*cause.failure);
  return res;
}

CheckResult done(Derivation d) {
  CheckResult res;
  res.derivation = std::move(d);
  return res;
}

Derivation node(std::string rule, Judgement j, std::vector<Derivation> premises = {},
                std::vector<Evidence> evidence = {}) {
  return Derivation{std::move(rule), std::move(j), std::move(premises), std::move(evidence)};
}

Evidence fresh_ev(EvidenceKind k, std::string var) { return Evidence{k, std::move(var), {}, {}, {}, {}, {}}; }

Evidence decide_ev(Claim c, Verdict v) {
  Evidence e = fresh_ev(EvidenceKind::Decide, "");
  e.claim = std::move(c);
  e.verdict = std::move(v);
  return e;
}

Evidence witness_ev(Instantiation w) {
  Evidence e = fresh_ev(EvidenceKind::Witness, "");
  if (auto* t = std::get_if<Term>(&w)) {
    e.term = *t;
  } else {
    auto& [x, p] = std::get<std::pair<std::string, PredicateDef>>(w);
    e.var = x;
    e.pred = p;
  }
  return e;
}

const Term& subject(const CheckResult& r) { return r.derivation->conclusion.subject; }
const Formula& formula(const CheckResult& r) { return r.derivation->conclusion.formula; }

Claim equiv_claim(Term l, Term r) { return Claim{std::move(l), std::move(r), Polarity::Equiv}; }

// Names already used in g or in the given free variables.
struct Taken {
  FormulaFV fv;

  Taken(const TypingContext& g, const VarSets& extra) : fv(g.free_vars()) { fv.terms.merge(extra); }
  Taken(const TypingContext& g, const FormulaFV& extra) : fv(g.free_vars()) {
    fv.terms.merge(extra.terms);
    fv.preds.merge(extra.preds);
  }

  std::string lambda(const std::string& x) const {
    if (!fv.terms.lambda.contains(x)) return x;
    return fresh_name_avoiding(x, [&](const std::string& n) { return fv.terms.lambda.contains(n); });
  }
  std::string mu(const std::string& x) const {
    if (!fv.terms.mu.contains(x)) return x;
    return fresh_name_avoiding(x, [&](const std::string& n) { return fv.terms.mu.contains(n); });
  }
  std::string term(const std::string& x) const {
    if (!fv.terms.term.contains(x)) return x;
    return fresh_name_avoiding(x, [&](const std::string& n) { return fv.terms.term.contains(n); });
  }
  std::string pred(const std::string& x) const {
    if (!fv.preds.contains(x)) return x;
    return fresh_name_avoiding(x, [&](const std::string& n) { return fv.preds.contains(n); });
  }
};

FormulaFV fv_of(const Formula& a, const Term& t) {
  FormulaFV fv = a->fv;
  fv.terms.merge(t->fv);
  return fv;
}

std::optional<std::size_t> last_lambda_hyp(const TypingContext& g, const std::string& x) {
  for (std::size_t i = g.entries.size(); i-- > 0;)
    if (auto* h = std::get_if<LambdaHyp>(&g.entries[i]); h && h->var == x) return i;
  return std::nullopt;
}

TypingContext replace_entry(const TypingContext& g, std::size_t idx, std::vector<ContextEntry> with) {
  TypingContext h;
  h.entries.assign(g.entries.begin(), g.entries.begin() + static_cast<std::ptrdiff_t>(idx));
  for (auto& e : with) h.entries.push_back(std::move(e));
  h.entries.insert(h.entries.end(), g.entries.begin() + static_cast<std::ptrdiff_t>(idx) + 1, g.entries.end());
  return h;
}

class Checker {
 public:
  explicit Checker(const CheckOptions& o) : o_(o) {}

  CheckResult value(const TypingContext& g, const Value& v, const Formula& a);
  CheckResult term(const TypingContext& g, const Term& t, const Formula& a, std::size_t hint = 0);
  CheckResult synth_value(const TypingContext& g, const Value& v);
  CheckResult synth_term(const TypingContext& g, const Term& t, std::size_t hint = 0);

 private:
  CheckResult intro(const TypingContext& g, const std::string& x, const Term& t, const Formula& goal);
  CheckResult scissors(const TypingContext& g, const Formula& a, JudgementKind kind);
  CheckResult restrict_intro(const TypingContext& g, const Term& t, const Formula& a, const Restrict& r,
                             bool elaborate_scissors);
  CheckResult synth_app(const TypingContext& g, const Term& t, const App& app);
  CheckResult by_definition(const TypingContext& g, const Term& t, const Formula* a);
  std::optional<Formula> wrapper_domain(const Lambda& l, const Formula& a) const;
  CheckResult forall_by_equivalence(const TypingContext& g, const Term& t, const Formula& a);
  CheckResult against(const TypingContext& g, CheckResult synthesized, const Formula& a);
  CheckResult rewrite(const TypingContext& g, const Term& t, const Formula& a, const std::pair<Term, Term>& eq);
  CheckResult discharge(const TypingContext& g, const Term& l, const Term& r, Verdict v, CheckResult premise);

  Formula unfold(const Formula& f) const { return unfold_head(f, o_.types); }
  bool equiv(const Formula& a, const Formula& b) const { return formula_equiv(a, b, o_.types); }

  const std::vector<Instantiation>* hints_for(const Term& t) const {
    if (!o_.hints) return nullptr;
    auto it = o_.hints->instantiations.find(t.get());
    return it == o_.hints->instantiations.end() ? nullptr : &it->second;
  }

  const CheckOptions& o_;
  std::map<const TermNode*, std::size_t> rewrite_pos_;
};

// ---------------------------------------------------------------------------
// Value judgements

CheckResult Checker::value(const TypingContext& g, const Value& v, const Formula& a) {
  Judgement j = judge(JudgementKind::Value, g, mk::val(v), a);
  if (auto* x = as<LambdaVar>(v)) {
    if (const Formula* ty = g.lambda_type(x->name); ty && equiv(*ty, a)) return done(node("ax", j));
  }
  if (as<Scissors>(v)) return scissors(g, a, JudgementKind::Value);

  Formula u = unfold(a);
  if (auto* q = as<ForallTerm>(u)) {
    std::string b = Taken(g, fv_of(a, mk::val(v))).term(q->var);
    Formula body = b == q->var ? q->body : formula_subst(q->body, TermSubst{q->var, mk::tvar(b)});
    auto p = value(g.with(TermDecl{b}), v, body);
    if (!p.ok()) return p;
    j.subject = subject(p);
    return done(node("∀ᵢ", j, {std::move(*p.derivation)}, {fresh_ev(EvidenceKind::Fresh, b)}));
  }
  if (auto* q = as<ForallPred>(u)) {
    std::string y = Taken(g, fv_of(a, mk::val(v))).pred(q->var);
    Formula body = q->body;
    if (y != q->var) {
      std::vector<std::string> params;
      std::vector<Term> args;
      for (int i = 0; i < q->arity; ++i) {
        params.push_back("p" + std::to_string(i));
        args.push_back(mk::tvar(params.back()));
      }
      body = formula_subst(body, std::pair{q->var, PredicateDef{params, fm::pred(y, args)}});
    }
    auto p = value(g.with(PredDecl{y, q->arity}), v, body);
    if (!p.ok()) return p;
    j.subject = subject(p);
    return done(node("∀_I", j, {std::move(*p.derivation)}, {fresh_ev(EvidenceKind::Fresh, y)}));
  }
  if (auto* m = as<Member>(u)) {
    if (!alpha_eq(m->term, mk::val(v)))
      return fail(j, FailureReason::RuleMismatch,
                  fmt::format("membership in {} needs the value itself", to_string(m->term)));
    auto p = value(g, v, m->type);
    if (!p.ok()) return p;
    return done(node("∈ᵢ", j, {std::move(*p.derivation)}));
  }
  if (auto* ar = as<Arrow>(u)) {
    auto* l = as<Lambda>(v);
    if (!l) return fail(j, FailureReason::RuleMismatch, "only a λ-abstraction has an arrow type here");
    std::string x = Taken(g, fv_of(a, mk::val(v))).lambda(l->param);
    Term body = x == l->param ? l->body : subst(l->body, LambdaSubst{l->param, mk::var(x)});
    auto p = intro(g.with(LambdaHyp{x, ar->dom}), x, body, ar->cod);
    if (!p.ok()) return fail_because(j, FailureReason::RuleMismatch, "body of λ" + l->param + " does not check", p);
    j.subject = mk::val(mk::lam(x, subject(p)));
    return done(node("⇒ᵢ", j, {std::move(*p.derivation)}, {fresh_ev(EvidenceKind::Fresh, x)}));
  }
  if (auto* rt = as<RecordTy>(u)) {
    auto* r = as<Record>(v);
    if (!r) return fail(j, FailureReason::RuleMismatch, "a record type needs a record");
    if (r->fields.size() != rt->fields.size())
      return fail(j, FailureReason::RuleMismatch, "record fields do not match the record type");
    std::vector<Derivation> ps;
    std::map<std::string, Value> fields;
    for (const auto& [l, w] : r->fields) {
      auto it = rt->fields.find(l);
      if (it == rt->fields.end()) return fail(j, FailureReason::RuleMismatch, "field " + l + " is not in the type");
      auto p = value(g, w, it->second);
      if (!p.ok()) return p;
      fields.emplace(l, value_of(subject(p)));
      ps.push_back(std::move(*p.derivation));
    }
    j.subject = mk::val(mk::record(std::move(fields)));
    return done(node("×ᵢ", j, std::move(ps)));
  }
  if (auto* vt = as<VariantTy>(u)) {
    auto* c = as<Ctor>(v);
    if (!c) return fail(j, FailureReason::RuleMismatch, "a variant type needs a constructor");
    auto it = vt->ctors.find(c->name);
    if (it == vt->ctors.end()) return fail(j, FailureReason::RuleMismatch, c->name + " is not a constructor of the type");
    auto p = value(g, c->payload, it->second);
    if (!p.ok()) return p;
    j.subject = mk::val(mk::ctor(c->name, value_of(subject(p))));
    return done(node("+ᵢ", j, {std::move(*p.derivation)}));
  }
  if (as<Restrict>(u) || as<ExistsTerm>(u) || as<ExistsPred>(u)) {
    auto p = term(g, mk::val(v), a);
    if (!p.ok()) return p;
    if (!is_value(subject(p))) return fail(j, FailureReason::RuleMismatch, "elaboration left the value judgement");
    j.subject = subject(p);
    return done(node("↓", j, {std::move(*p.derivation)}));
  }
  return fail(j, FailureReason::RuleMismatch, fmt::format("no rule concludes {} : {}", to_string(v), to_string(a)));
}

// ---------------------------------------------------------------------------
// Hypotheses: left rules applied as soon as a hypothesis enters the context

CheckResult Checker::intro(const TypingContext& g, const std::string& x, const Term& t, const Formula& goal) {
  auto idx = last_lambda_hyp(g, x);
  if (!idx) return term(g, t, goal);
  const Formula& a = std::get<LambdaHyp>(g.entries[*idx]).type;
  Formula u = unfold(a);
  Judgement j = judge(JudgementKind::Term, g, t, goal);
  auto finish = [&](const std::string& rule, const CheckResult& p, std::vector<Evidence> ev) {
    if (!p.ok()) return p;
    j.subject = subject(p);
    ev.insert(ev.begin(), fresh_ev(EvidenceKind::Target, x));
    return done(node(rule, j, {*p.derivation}, std::move(ev)));
  };
  Term xv = mk::val(mk::var(x));
  if (auto* m = as<Member>(u)) {
    auto g2 = replace_entry(g, *idx, {LambdaHyp{x, m->type}, EquivHyp{xv, m->term}});
    return finish("∈ₑ", intro(g2, x, t, goal), {});
  }
  if (auto* r = as<Restrict>(u)) {
    auto g2 = replace_entry(g, *idx, {LambdaHyp{x, r->type}, EquivHyp{r->lhs, r->rhs}});
    return finish("↾ₑ", intro(g2, x, t, goal), {});
  }
  if (auto* q = as<ExistsTerm>(u)) {
    FormulaFV avoid = fv_of(goal, t);
    std::string b = Taken(g, avoid).term(q->var);
    Formula body = b == q->var ? q->body : formula_subst(q->body, TermSubst{q->var, mk::tvar(b)});
    auto g2 = replace_entry(g, *idx, {TermDecl{b}, LambdaHyp{x, body}});
    return finish("∃ₑ", intro(g2, x, t, goal), {fresh_ev(EvidenceKind::Fresh, b)});
  }
  if (auto* q = as<ExistsPred>(u)) {
    std::string y = Taken(g, fv_of(goal, t)).pred(q->var);
    Formula body = q->body;
    if (y != q->var) {
      std::vector<std::string> params;
      std::vector<Term> args;
      for (int i = 0; i < q->arity; ++i) {
        params.push_back("p" + std::to_string(i));
        args.push_back(mk::tvar(params.back()));
      }
      body = formula_subst(body, std::pair{q->var, PredicateDef{params, fm::pred(y, args)}});
    }
    auto g2 = replace_entry(g, *idx, {PredDecl{y, q->arity}, LambdaHyp{x, body}});
    return finish("∃_E", intro(g2, x, t, goal), {fresh_ev(EvidenceKind::Fresh, y)});
  }
  if (auto* r = as<RecordTy>(u); r && r->fields.empty() && !g.has_equation(xv, mk::val(mk::unit()))) {
    auto g2 = replace_entry(g, *idx, {LambdaHyp{x, a}, EquivHyp{xv, mk::val(mk::unit())}});
    return finish("{}ₑ", term(g2, t, goal), {});
  }
  return term(g, t, goal);
}

// ---------------------------------------------------------------------------
// ✂ and equational discharge

CheckResult Checker::discharge(const TypingContext& g, const Term& l, const Term& r, Verdict v, CheckResult premise) {
  if (!premise.ok()) return premise;
  Judgement j = premise.derivation->conclusion;
  j.context = g;
  return done(node("≡", j, {std::move(*premise.derivation)}, {decide_ev(equiv_claim(l, r), std::move(v))}));
}

CheckResult Checker::scissors(const TypingContext& g, const Formula& a, JudgementKind kind) {
  Term sc = mk::val(mk::scissors());
  Judgement j = judge(kind, g, sc, a);
  Verdict c = context_contradictory(restrict_to_equational(g), o_.budget);
  if (c.kind == VerdictKind::Proved) {
    Formula bot = sugar_bot();
    Evidence ev = fresh_ev(EvidenceKind::Contradiction, "");
    ev.verdict = c;
    Derivation d0 = node("✂", judge(JudgementKind::Value, g, sc, bot), {}, {ev});
    if (kind == JudgementKind::Value && equiv(a, bot)) return done(std::move(d0));
    Derivation d1 = node("↑", judge(JudgementKind::Term, g, sc, bot), {std::move(d0)});
    if (kind == JudgementKind::Term && equiv(a, bot)) return done(std::move(d1));
    const auto& q = std::get<ForallPred>(bot->node);
    Derivation d2 = node("∀_E", judge(JudgementKind::Term, g, sc, a), {std::move(d1)},
                         {witness_ev(std::pair{q.var, PredicateDef{{}, a}})});
    if (kind == JudgementKind::Term) return done(std::move(d2));
    return done(node("↓", j, {std::move(d2)}));
  }
  if (auto* r = as<Restrict>(unfold(a))) {
    auto p = restrict_intro(g, sc, a, *r, true);
    if (!p.ok() || kind == JudgementKind::Term) return p;
    j.subject = subject(p);
    return done(node("↓", j, {std::move(*p.derivation)}));
  }
  return fail(j, FailureReason::EquivalenceUnknown, "✂ needs a contradictory equational context");
}

// t : A ↾ l ≡ r, discharging l ≡ r with the decision procedure when it is not a hypothesis.
CheckResult Checker::restrict_intro(const TypingContext& g, const Term& t, const Formula& a, const Restrict& r,
                                    bool elaborate_scissors) {
  auto body = [&](const TypingContext& h) {
    Judgement j = judge(JudgementKind::Term, h, t, a);
    CheckResult p;
    if (elaborate_scissors && is_top(r.type))
      p = term(h, mk::val(mk::unit()), r.type);
    else
      p = term(h, t, r.type);
    if (!p.ok()) return p;
    j.subject = subject(p);
    return done(node("↾ᵢ", j, {std::move(*p.derivation)}));
  };
  if (g.has_equation(r.lhs, r.rhs)) return body(g);
  Verdict v = decide(restrict_to_equational(g), r.lhs, r.rhs, Polarity::Equiv, o_.budget);
  if (v.kind == VerdictKind::Proved) return discharge(g, r.lhs, r.rhs, v, body(g.with(EquivHyp{r.lhs, r.rhs})));
  Judgement j = judge(JudgementKind::Term, g, t, a);
  if (v.kind == VerdictKind::Refuted)
    return fail(j, FailureReason::EquivalenceRefuted, "the equation is refuted", equiv_claim(r.lhs, r.rhs));
  return fail(j, FailureReason::EquivalenceUnknown, "the equation could not be proved", equiv_claim(r.lhs, r.rhs));
}

// ---------------------------------------------------------------------------
// Term judgements

CheckResult Checker::against(const TypingContext& g, CheckResult s, const Formula& a) {
  if (!s.ok()) return s;
  Formula ty = formula(s);
  if (equiv(ty, a)) return s;
  Judgement j = judge(JudgementKind::Term, g, subject(s), a);
  if (is_top(a)) {
    const auto& q = std::get<ExistsPred>(a->node);
    return done(node("∃_I", j, {std::move(*s.derivation)}, {witness_ev(std::pair{q.var, PredicateDef{{}, ty}})}));
  }
  return fail(j, FailureReason::RuleMismatch, fmt::format("the term has type {}", to_string(ty)));
}

CheckResult Checker::rewrite(const TypingContext& g, const Term& t, const Formula& a, const std::pair<Term, Term>& eq) {
  // Goal a mentions eq.first; the premise goal mentions eq.second instead.
  Judgement j = judge(JudgementKind::Term, g, t, a);
  const auto& [from, to] = eq;
  std::string c = Taken(g, fv_of(a, t)).term("c");
  Term hole = mk::tvar(c);
  // Abstract every occurrence of `from` inside the terms of a.
  std::function<Term(const Term&)> abstract = [&](const Term& s) -> Term {
    if (alpha_eq(s, from)) return hole;
    return std::visit(overloaded{[&](const App& ap) { return mk::app(abstract(ap.fun), abstract(ap.arg)); },
                                 [&](const auto&) { return s; }},
                      s->node);
  };
  std::function<Formula(const Formula&)> tmpl = [&](const Formula& f) -> Formula {
    return std::visit(
        overloaded{[&](const Restrict& r) { return fm::restrict(tmpl(r.type), abstract(r.lhs), abstract(r.rhs)); },
                   [&](const Member& m) { return fm::member(abstract(m.term), tmpl(m.type)); },
                   [&](const Arrow& ar) { return fm::arrow(tmpl(ar.dom), tmpl(ar.cod)); },
                   [&](const auto&) { return f; }},
        f->node);
  };
  Formula template_f = tmpl(a);
  if (!template_f->fv.terms.term.contains(c))
    return fail(j, FailureReason::RuleMismatch, fmt::format("{} does not occur in the goal", to_string(from)));
  Formula premise_goal = formula_subst(template_f, TermSubst{c, to});

  auto body = [&](const TypingContext& h) {
    auto p = term(h, t, premise_goal);
    if (!p.ok()) return p;
    Judgement jj = judge(JudgementKind::Term, h, subject(p), a);
    Evidence ev = fresh_ev(EvidenceKind::Rewrite, c);
    ev.formula = template_f;
    ev.claim = equiv_claim(to, from);
    return done(node("≡ₜᵣ", jj, {std::move(*p.derivation)}, {ev}));
  };
  if (g.has_equation(from, to)) return body(g);
  Verdict v = decide(restrict_to_equational(g), from, to, Polarity::Equiv, o_.budget);
  if (v.kind != VerdictKind::Proved)
    return fail(j, v.kind == VerdictKind::Refuted ? FailureReason::EquivalenceRefuted : FailureReason::EquivalenceUnknown,
                "rewrite equation not provable", equiv_claim(from, to));
  return discharge(g, from, to, v, body(g.with(EquivHyp{from, to})));
}

CheckResult Checker::forall_by_equivalence(const TypingContext& g, const Term& t, const Formula& a) {
  Judgement j = judge(JudgementKind::Term, g, t, a);
  auto r = apply_semantical_restriction(g, t, o_.budget);
  if (!r)
    return fail(j, FailureReason::EquivalenceUnknown, "generalization needs a value equivalent to the term",
                equiv_claim(t, normalize(t, o_.budget.fuel)));
  Term v = mk::val(r->value);
  bool present = g.has_equation(t, v);
  TypingContext g2 = present ? g : g.with(EquivHyp{t, v});
  auto pv = value(g2, r->value, a);
  if (!pv.ok()) return pv;
  Judgement ju = judge(JudgementKind::Term, g2, subject(pv), a);
  Derivation up = node("↑", ju, {std::move(*pv.derivation)});
  std::string b = Taken(g2, fv_of(a, t)).term("b");
  Evidence ev = fresh_ev(EvidenceKind::Rewrite, b);
  ev.term = mk::tvar(b);
  ev.claim = equiv_claim(v, t);
  Derivation back = node("≡ₜₗ", judge(JudgementKind::Term, g2, t, a), {std::move(up)}, {ev});
  Derivation macro = node("∀ᵢ,≡", back.conclusion, {back});
  if (present) return done(std::move(macro));
  return discharge(g, t, v, r->verdict, done(std::move(macro)));
}

CheckResult Checker::term(const TypingContext& g, const Term& t, const Formula& a, std::size_t hint) {
  Judgement j = judge(JudgementKind::Term, g, t, a);
  if (o_.hints) {
    auto it = o_.hints->rewrites.find(t.get());
    std::size_t& pos = rewrite_pos_[t.get()];
    if (it != o_.hints->rewrites.end() && pos < it->second.size()) {
      std::size_t mine = pos++;
      auto res = rewrite(g, t, a, it->second[mine]);
      rewrite_pos_[t.get()] = mine;
      return res;
    }
  }
  if (is_value(t) && as<Scissors>(value_of(t))) return scissors(g, a, JudgementKind::Term);

  const auto* hs = hints_for(t);
  bool has_hints = hs && hint < hs->size();
  Formula u = unfold(a);

  if (auto* r = as<Restrict>(u)) {
    bool structural = as<Case>(t) || as<Mu>(t) || as<Proc>(t) || (as<App>(t) && is_value(as<App>(t)->fun));
    if (!structural || g.has_equation(r->lhs, r->rhs)) return restrict_intro(g, t, a, *r, false);
    Verdict v = decide(restrict_to_equational(g), r->lhs, r->rhs, Polarity::Equiv, o_.budget);
    if (v.kind == VerdictKind::Proved) return restrict_intro(g, t, a, *r, false);
  }
  if (auto* q = as<ExistsTerm>(u); q && has_hints) {
    const auto& w = (*hs)[hint];
    auto* wt = std::get_if<Term>(&w);
    if (!wt) return fail(j, FailureReason::RuleMismatch, "∃ over a term needs a term witness");
    auto p = term(g, t, formula_subst(q->body, TermSubst{q->var, *wt}), hint + 1);
    if (!p.ok()) return p;
    j.subject = subject(p);
    return done(node("∃ᵢ", j, {std::move(*p.derivation)}, {witness_ev(w)}));
  }
  if (auto* q = as<ExistsPred>(u); q && has_hints && !is_top(u)) {
    const auto& w = (*hs)[hint];
    auto* wp = std::get_if<std::pair<std::string, PredicateDef>>(&w);
    if (!wp) return fail(j, FailureReason::RuleMismatch, "∃ over a predicate needs a predicate witness");
    if (static_cast<int>(wp->second.params.size()) != q->arity)
      return fail(j, FailureReason::RuleMismatch, "predicate witness has the wrong arity");
    auto p = term(g, t, formula_subst(q->body, std::pair{q->var, wp->second}), hint + 1);
    if (!p.ok()) return p;
    j.subject = subject(p);
    Evidence ev = witness_ev(std::pair{q->var, wp->second});
    return done(node("∃_I", j, {std::move(*p.derivation)}, {ev}));
  }
  if (is_top(u)) return against(g, synth_term(g, t, hint), a);
  if (as<ExistsTerm>(u) || as<ExistsPred>(u))
    return fail(j, FailureReason::AnnotationNeeded, "an existential goal needs a witness annotation");
  if ((as<ForallTerm>(u) || as<ForallPred>(u)) && !is_value(t) && !has_hints) {
    auto gen = forall_by_equivalence(g, t, a);
    if (gen.ok() || !as<App>(t)) return gen;
    auto syn = against(g, synth_term(g, t), a);
    if (syn.ok() || syn.failure->reason != FailureReason::AnnotationNeeded) return syn;
    return gen;
  }
  if (has_hints) return against(g, synth_term(g, t, hint), a);

  return std::visit(
      overloaded{
          [&](const Val& x) -> CheckResult {
            auto p = value(g, x.value, a);
            if (!p.ok()) return p;
            j.subject = subject(p);
            return done(node("↑", j, {std::move(*p.derivation)}));
          },
          [&](const App& ap) -> CheckResult {
            if (!is_value(ap.fun) || !as<Lambda>(value_of(ap.fun)) || hints_for(ap.fun))
              return against(g, synth_term(g, t), a);
            auto dom = wrapper_domain(*as<Lambda>(value_of(ap.fun)), a);
            auto s = dom ? term(g, ap.arg, *dom) : synth_term(g, ap.arg);
            if (dom && !s.ok()) return s;
            if (!s.ok()) return fail_because(j, FailureReason::AnnotationNeeded, "cannot infer the type of the argument", s);
            Formula arrow = fm::arrow(formula(s), a);
            auto pf = value(g, value_of(ap.fun), arrow);
            if (!pf.ok()) return pf;
            Judgement ju = judge(JudgementKind::Term, g, subject(pf), arrow);
            Derivation up = node("↑", ju, {std::move(*pf.derivation)});
            j.subject = mk::app(up.conclusion.subject, subject(s));
            return done(node("⇒ₑ", j, {std::move(up), std::move(*s.derivation)}));
          },
          [&](const Mu& m) -> CheckResult {
            std::string b = Taken(g, fv_of(a, t)).mu(m.var);
            Term body = b == m.var ? m.body : subst(m.body, StackSubst{m.var, mk::svar(b)});
            auto p = term(g.with(StackHyp{b, a}), body, a);
            if (!p.ok()) return p;
            j.subject = mk::mu(b, subject(p));
            return done(node("μ", j, {std::move(*p.derivation)}, {fresh_ev(EvidenceKind::Fresh, b)}));
          },
          [&](const Proc& p) -> CheckResult {
            auto* sv = as<StackVar>(p.process.stack);
            if (!sv) return fail(j, FailureReason::RuleMismatch, "only a restart on a stack variable is typed");
            const Formula* ty = g.stack_type(sv->name);
            if (!ty) return fail(j, FailureReason::RuleMismatch, "stack variable " + sv->name + " has no type");
            auto q = term(g, p.process.term, *ty);
            if (!q.ok()) return q;
            j.subject = mk::proc(subject(q), p.process.stack);
            return done(node("∗", j, {std::move(*q.derivation)}));
          },
          [&](const Case& c) -> CheckResult {
            auto s = synth_value(g, c.scrutinee);
            if (!s.ok()) return fail_because(j, FailureReason::AnnotationNeeded, "cannot infer the type of the scrutinee", s);
            auto* vt = as<VariantTy>(unfold(formula(s)));
            if (!vt) return fail(j, FailureReason::RuleMismatch, "the scrutinee does not have a variant type");
            if (vt->ctors.size() != c.branches.size())
              return fail(j, FailureReason::RuleMismatch, "the branches do not match the variant type");
            Formula vty = fm::variant(vt->ctors);
            if (!formula_alpha_eq(vty, formula(s))) {
              s.derivation->conclusion.formula = vty;
            }
            Term scrut = subject(s);
            std::vector<Derivation> ps{std::move(*s.derivation)};
            std::vector<Evidence> evs;
            std::map<std::string, Branch> branches;
            for (const auto& [k, ak] : vt->ctors) {
              auto bt = c.branches.find(k);
              if (bt == c.branches.end()) return fail(j, FailureReason::RuleMismatch, "missing branch for " + k);
              const Branch& br = bt->second;
              std::string y = Taken(g, fv_of(a, t)).lambda(br.var);
              Term body = y == br.var ? br.body : subst(br.body, LambdaSubst{br.var, mk::var(y)});
              TypingContext g2 = g.with(LambdaHyp{y, ak}).with(EquivHyp{mk::val(mk::ctor(k, mk::var(y))), scrut});
              auto p = intro(g2, y, body, a);
              if (!p.ok()) return fail_because(j, FailureReason::RuleMismatch, "branch " + k + " does not check", p);
              branches.emplace(k, Branch{y, subject(p)});
              ps.push_back(std::move(*p.derivation));
              evs.push_back(fresh_ev(EvidenceKind::Fresh, y));
            }
            j.subject = mk::case_of(value_of(scrut), std::move(branches));
            return done(node("+ₑ", j, std::move(ps), std::move(evs)));
          },
          [&](const Proj&) -> CheckResult { return against(g, synth_term(g, t), a); },
          [&](const TermVar&) -> CheckResult { return by_definition(g, t, &a); },
          [&](const auto&) -> CheckResult {
            return fail(j, FailureReason::AnnotationNeeded, "no rule applies to this term");
          }},
      t->node);
}

// ---------------------------------------------------------------------------
// Synthesis

CheckResult Checker::synth_value(const TypingContext& g, const Value& v) {
  Judgement j = judge(JudgementKind::Value, g, mk::val(v), sugar_top());
  if (auto* x = as<LambdaVar>(v)) {
    const Formula* ty = g.lambda_type(x->name);
    if (!ty) return fail(j, FailureReason::RuleMismatch, x->name + " has no type in the context");
    j.formula = *ty;
    return done(node("ax", j));
  }
  if (auto* c = as<Ctor>(v)) {
    // A declared variant with this constructor is preferred to the singleton.
    if (o_.types) {
      for (const auto& [name, body] : o_.types->all()) {
        auto* vt = as<VariantTy>(body);
        if (!vt || !vt->ctors.count(c->name)) continue;
        auto p = value(g, v, fm::named(name));
        if (p.ok()) return p;
      }
    }
    auto p = synth_value(g, c->payload);
    if (!p.ok()) return p;
    j.formula = fm::variant({{c->name, formula(p)}});
    return done(node("+ᵢ", j, {std::move(*p.derivation)}));
  }
  if (auto* r = as<Record>(v)) {
    std::vector<Derivation> ps;
    std::map<std::string, Formula> fields;
    for (const auto& [l, w] : r->fields) {
      auto p = synth_value(g, w);
      if (!p.ok()) return p;
      fields.emplace(l, formula(p));
      ps.push_back(std::move(*p.derivation));
    }
    j.formula = fm::record(std::move(fields));
    return done(node("×ᵢ", j, std::move(ps)));
  }
  return fail(j, FailureReason::AnnotationNeeded, "cannot infer a type for " + to_string(v));
}

CheckResult Checker::synth_app(const TypingContext& g, const Term& t, const App& app) {
  Judgement j = judge(JudgementKind::Term, g, t, sugar_top());
  const Term& u = app.arg;
  std::optional<Restriction> r;
  TypingContext g2 = g;
  bool added = false;
  if (!is_value(u)) {
    r = apply_semantical_restriction(g, u, o_.budget);
    if (r && !g.has_equation(u, mk::val(r->value))) {
      g2 = g.with(EquivHyp{u, mk::val(r->value)});
      added = true;
    }
  }
  auto wrap = [&](CheckResult res) {
    if (!added || !res.ok()) return res;
    return discharge(g, u, mk::val(r->value), r->verdict, std::move(res));
  };
  auto sf = synth_term(g2, app.fun);
  if (!sf.ok() && is_value(app.fun) && as<Lambda>(value_of(app.fun))) {
    // Type the body under the synthesized type of the argument.
    const auto& l = *as<Lambda>(value_of(app.fun));
    auto su = synth_term(g2, u);
    if (!su.ok()) return sf;
    std::string x = Taken(g2, fv_of(formula(su), t)).lambda(l.param);
    Term body = x == l.param ? l.body : subst(l.body, LambdaSubst{l.param, mk::var(x)});
    auto sb = synth_term(g2.with(LambdaHyp{x, formula(su)}), body);
    if (!sb.ok() || sb.derivation->conclusion.formula->fv.terms.lambda.contains(x)) return sf;
    Formula arrow = fm::arrow(formula(su), formula(sb));
    auto pf = value(g2, value_of(app.fun), arrow);
    if (!pf.ok()) return sf;
    Judgement ju = judge(JudgementKind::Term, g2, subject(pf), arrow);
    Derivation up = node("↑", ju, {std::move(*pf.derivation)});
    Judgement jj = judge(JudgementKind::Term, g2, mk::app(up.conclusion.subject, subject(su)), formula(sb));
    return wrap(done(node("⇒ₑ", jj, {std::move(up), std::move(*su.derivation)})));
  }
  if (!sf.ok()) return sf;
  // ∀X (X ⇒ B) applied without a witness: X is the argument's type.
  while (auto* q = as<ForallPred>(unfold(formula(sf)))) {
    auto* ar = q->arity == 0 ? as<Arrow>(q->body) : nullptr;
    auto* x = ar ? as<PredApp>(ar->dom) : nullptr;
    if (!x || x->var != q->var || !x->args.empty()) break;
    auto su = synth_term(g2, u);
    if (!su.ok()) break;
    PredicateDef w{{}, formula(su)};
    Judgement jj = sf.derivation->conclusion;
    jj.formula = formula_subst(q->body, std::pair{q->var, w});
    Evidence ev = witness_ev(std::pair{q->var, w});
    sf = done(node("∀_E", jj, {std::move(*sf.derivation)}, {ev}));
  }
  Formula f = unfold(formula(sf));
  if (auto* ar = as<Arrow>(f)) {
    auto pu = term(g2, u, ar->dom);
    if (!pu.ok()) return pu;
    Judgement jj = judge(JudgementKind::Term, g2, mk::app(subject(sf), subject(pu)), ar->cod);
    return wrap(done(node("⇒ₑ", jj, {std::move(*sf.derivation), std::move(*pu.derivation)})));
  }
  auto pi = as_pi(f);
  if (!pi) return fail(j, FailureReason::RuleMismatch, "applied term has type " + to_string(formula(sf)));
  if (!r && !is_value(u)) {
    return fail(j, FailureReason::EquivalenceUnknown, "dependent application to a term with no known value",
                equiv_claim(u, normalize(u, o_.budget.fuel)));
  }
  if (is_value(u)) {
    Formula dom = formula_subst(pi->domain, TermSubst{pi->var, u});
    Formula cod = formula_subst(pi->body, TermSubst{pi->var, u});
    Formula inst = fm::arrow(fm::member(u, dom), cod);
    Judgement j1 = judge(JudgementKind::Term, g2, subject(sf), inst);
    Derivation d1 = node("∀ₑ", j1, {std::move(*sf.derivation)},
                         {witness_ev(u)});
    auto pv = value(g2, value_of(u), dom);
    if (!pv.ok()) return pv;
    Derivation d2 = node("∈ᵢ", judge(JudgementKind::Value, g2, u, fm::member(u, dom)), {std::move(*pv.derivation)});
    Derivation d3 = node("↑", judge(JudgementKind::Term, g2, u, fm::member(u, dom)), {std::move(d2)});
    Judgement jj = judge(JudgementKind::Term, g2, mk::app(d1.conclusion.subject, u), cod);
    return wrap(done(node("⇒ₑ", jj, {std::move(d1), std::move(d3)})));
  }
  Formula dom = formula_subst(pi->domain, TermSubst{pi->var, u});
  auto pv = value(g2, r->value, dom);
  if (!pv.ok()) return pv;
  Derivation macro = pi_elim_macro(g, u, *r, std::move(*sf.derivation), std::move(*pv.derivation), o_);
  return done(std::move(macro));
}

std::optional<Formula> Checker::wrapper_domain(const Lambda& l, const Formula& a) const {
  if (!is_value(l.body)) return std::nullopt;
  const Value& b = value_of(l.body);
  auto is_param = [&](const Value& v) {
    auto* x = as<LambdaVar>(v);
    return x && x->name == l.param;
  };
  Formula u = unfold(a);
  if (auto* c = as<Ctor>(b); c && is_param(c->payload)) {
    auto* vt = as<VariantTy>(u);
    if (!vt) return std::nullopt;
    auto it = vt->ctors.find(c->name);
    if (it != vt->ctors.end()) return it->second;
  }
  if (auto* r = as<Record>(b)) {
    auto* rt = as<RecordTy>(u);
    if (!rt) return std::nullopt;
    for (const auto& [label, v] : r->fields) {
      auto it = rt->fields.find(label);
      if (is_param(v) && it != rt->fields.end()) return it->second;
    }
  }
  return std::nullopt;
}

CheckResult Checker::by_definition(const TypingContext& g, const Term& t, const Formula* a) {
  const std::string& x = std::get<TermVar>(t->node).name;
  Judgement j = judge(JudgementKind::Term, g, t, a ? *a : sugar_top());
  std::optional<Term> def;
  for (auto it = g.entries.rbegin(); it != g.entries.rend() && !def; ++it) {
    auto* e = std::get_if<EquivHyp>(&*it);
    if (!e) continue;
    auto names = [&](const Term& s) {
      auto* v = as<TermVar>(s);
      return v && v->name == x;
    };
    if (names(e->lhs) && !e->rhs->fv.term.contains(x)) def = e->rhs;
    else if (names(e->rhs) && !e->lhs->fv.term.contains(x)) def = e->lhs;
  }
  if (!def) return fail(j, FailureReason::AnnotationNeeded, x + " has no type and no definition");
  const Formula* declared = nullptr;
  if (o_.term_types) {
    auto it = o_.term_types->find(x);
    if (it != o_.term_types->end()) declared = &it->second;
  }
  auto p = a ? term(g, *def, *a) : declared ? term(g, *def, *declared) : synth_term(g, *def);
  if (!p.ok()) return fail_because(j, FailureReason::RuleMismatch, "the definition of " + x + " does not check", p);
  if (!alpha_eq(subject(p), *def))
    return fail(j, FailureReason::RuleMismatch, "the definition of " + x + " was elaborated");
  j.formula = formula(p);
  std::string b = Taken(g, fv_of(j.formula, t)).term("b");
  Evidence ev = fresh_ev(EvidenceKind::Rewrite, b);
  ev.term = mk::tvar(b);
  ev.claim = equiv_claim(*def, t);
  return done(node("≡ₜₗ", j, {std::move(*p.derivation)}, {ev}));
}

CheckResult Checker::synth_term(const TypingContext& g, const Term& t, std::size_t hint) {
  Judgement j = judge(JudgementKind::Term, g, t, sugar_top());
  CheckResult base = std::visit(
      overloaded{[&](const Val& x) -> CheckResult {
                   auto p = synth_value(g, x.value);
                   if (!p.ok()) return p;
                   Judgement jj = judge(JudgementKind::Term, g, subject(p), formula(p));
                   return done(node("↑", jj, {std::move(*p.derivation)}));
                 },
                 [&](const App& ap) -> CheckResult { return synth_app(g, t, ap); },
                 [&](const TermVar&) -> CheckResult { return by_definition(g, t, nullptr); },
                 [&](const Proj& pr) -> CheckResult {
                   auto p = synth_value(g, pr.record);
                   if (!p.ok()) return p;
                   auto* rt = as<RecordTy>(unfold(formula(p)));
                   if (!rt) return fail(j, FailureReason::RuleMismatch, "projection from a non-record");
                   auto it = rt->fields.find(pr.label);
                   if (it == rt->fields.end()) return fail(j, FailureReason::RuleMismatch, "no field " + pr.label);
                   Formula rty = fm::record(rt->fields);
                   if (!formula_alpha_eq(rty, formula(p))) p.derivation->conclusion.formula = rty;
                   Judgement jj = judge(JudgementKind::Term, g, mk::proj(value_of(subject(p)), pr.label), it->second);
                   return done(node("×ₑ", jj, {std::move(*p.derivation)}));
                 },
                 [&](const auto&) -> CheckResult {
                   return fail(j, FailureReason::AnnotationNeeded, "cannot infer a type for " + to_string(t));
                 }},
      t->node);
  if (!base.ok()) return base;
  const auto* hs = hints_for(t);
  if (!hs) return base;
  for (std::size_t i = hint; i < hs->size(); ++i) {
    Formula f = unfold(formula(base));
    const auto& w = (*hs)[i];
    Judgement jj = base.derivation->conclusion;
    if (auto* q = as<ForallTerm>(f); q && std::holds_alternative<Term>(w)) {
      jj.formula = formula_subst(q->body, TermSubst{q->var, std::get<Term>(w)});
      base = done(node("∀ₑ", jj, {std::move(*base.derivation)}, {witness_ev(w)}));
      continue;
    }
    auto* q = as<ForallPred>(f);
    auto* wp = std::get_if<std::pair<std::string, PredicateDef>>(&w);
    if (q && wp) {
      if (static_cast<int>(wp->second.params.size()) != q->arity)
        return fail(jj, FailureReason::RuleMismatch, "predicate witness has the wrong arity");
      jj.formula = formula_subst(q->body, std::pair{q->var, wp->second});
      base = done(node("∀_E", jj, {std::move(*base.derivation)}, {witness_ev(std::pair{q->var, wp->second})}));
      continue;
    }
    return fail(jj, FailureReason::RuleMismatch, "annotation does not match a universal quantifier");
  }
  return base;
}

}  // namespace

// ---------------------------------------------------------------------------

std::optional<Restriction> apply_semantical_restriction(const TypingContext& g, const Term& u, const Budget& budget) {
  if (is_value(u)) {
    Verdict refl;
    refl.kind = VerdictKind::Proved;
    refl.certificate.summary = "reflexivity";
    return Restriction{value_of(u), refl};
  }
  EquationalContext e = restrict_to_equational(g);
  std::vector<Term> candidates;
  Term n = normalize(u, budget.fuel);
  if (is_value(n)) candidates.push_back(n);
  if (auto m = normalize_in_context(e, u, budget); m && is_value(*m)) candidates.push_back(*m);
  for (const auto& c : e) {
    if (c.polarity != Polarity::Equiv) continue;
    if (alpha_eq(c.lhs, u) && is_value(c.rhs)) candidates.push_back(c.rhs);
    if (alpha_eq(c.rhs, u) && is_value(c.lhs)) candidates.push_back(c.lhs);
  }
  for (const auto& v : candidates) {
    Verdict verdict = decide(e, u, v, Polarity::Equiv, budget);
    if (verdict.kind == VerdictKind::Proved) return Restriction{value_of(v), std::move(verdict)};
  }
  return std::nullopt;
}

Derivation pi_elim_macro(const TypingContext& g, const Term& u, const Restriction& r, Derivation d_fun,
                         Derivation d_arg, const CheckOptions& opts) {
  Term v = mk::val(r.value);
  bool present = g.has_equation(u, v);
  TypingContext g2 = present ? g : g.with(EquivHyp{u, v});
  Term t = d_fun.conclusion.subject;
  auto pi = as_pi(unfold_head(d_fun.conclusion.formula, opts.types));
  Formula dom = formula_subst(pi->domain, TermSubst{pi->var, u});
  Formula cod = formula_subst(pi->body, TermSubst{pi->var, u});

  Derivation d1 = node("∀ₑ", judge(JudgementKind::Term, g2, t, fm::arrow(fm::member(u, dom), cod)),
                       {std::move(d_fun)}, {witness_ev(u)});
  Derivation d2 = node("∈ᵢ", judge(JudgementKind::Value, g2, v, fm::member(v, dom)), {std::move(d_arg)});
  Derivation d3 = node("↑", judge(JudgementKind::Term, g2, v, fm::member(v, dom)), {std::move(d2)});

  FormulaFV avoid = fv_of(dom, u);
  avoid.terms.merge(v->fv);
  Taken taken(g2, avoid);
  std::string b = taken.term("b");
  Evidence e4 = fresh_ev(EvidenceKind::Rewrite, b);
  e4.term = mk::tvar(b);
  e4.claim = equiv_claim(v, u);
  Derivation d4 = node("≡ₜₗ", judge(JudgementKind::Term, g2, u, fm::member(v, dom)), {std::move(d3)}, {e4});

  Evidence e5 = fresh_ev(EvidenceKind::Rewrite, b);
  e5.formula = fm::member(mk::tvar(b), dom);
  e5.claim = equiv_claim(v, u);
  Derivation d5 = node("≡ₜᵣ", judge(JudgementKind::Term, g2, u, fm::member(u, dom)), {std::move(d4)}, {e5});

  Derivation d6 = node("⇒ₑ", judge(JudgementKind::Term, g2, mk::app(t, u), cod), {std::move(d1), std::move(d5)});
  Derivation macro = node("Πₑ,≡", d6.conclusion, {d6});
  if (present) return macro;
  Judgement j = macro.conclusion;
  j.context = g;
  return node("≡", j, {std::move(macro)}, {decide_ev(equiv_claim(u, v), r.verdict)});
}

CheckResult check_value(const TypingContext& g, const Value& v, const Formula& a, const CheckOptions& opts) {
  Validity valid = context_valid(g);
  if (!valid.ok)
    return fail(judge(JudgementKind::Value, g, mk::val(v), a), FailureReason::ContextInvalid, valid.diagnostic);
  Checker c(opts);
  return c.value(g, v, a);
}

CheckResult check_term(const TypingContext& g, const Term& t, const Formula& a, const CheckOptions& opts) {
  Validity valid = context_valid(g);
  if (!valid.ok)
    return fail(judge(JudgementKind::Term, g, t, a), FailureReason::ContextInvalid, valid.diagnostic);
  Checker c(opts);
  return c.term(g, t, a);
}

}  // namespace svr
