#include <fmt/format.h>

#include <functional>

#include "svr/checker.hpp"
#include "util.hpp"

namespace svr {

namespace {

using Error = std::optional<std::string>;

class Validator {
 public:
  explicit Validator(const CheckOptions& o) : o_(o) {}

  Error go(const Derivation& d) {
    Validity v = context_valid(d.conclusion.context);
    if (!v.ok) return at(d, "invalid context: " + v.diagnostic);
    for (const auto& p : d.premises)
      if (auto e = go(p)) return e;
    return rule(d);
  }

 private:
  Error at(const Derivation& d, const std::string& msg) const {
    return fmt::format("{} at {}: {}", d.rule, to_string(d.conclusion), msg);
  }

  bool equiv(const Formula& a, const Formula& b) const { return formula_equiv(a, b, o_.types); }
  Formula unfold(const Formula& f) const { return unfold_head(f, o_.types); }

  bool same_entry(const ContextEntry& a, const ContextEntry& b) const {
    if (a.index() != b.index()) return false;
    return std::visit(
        overloaded{[&](const LambdaHyp& h) {
                     auto& k = std::get<LambdaHyp>(b);
                     return h.var == k.var && equiv(h.type, k.type);
                   },
                   [&](const StackHyp& h) {
                     auto& k = std::get<StackHyp>(b);
                     return h.var == k.var && equiv(h.type, k.type);
                   },
                   [&](const TermDecl& h) { return h.var == std::get<TermDecl>(b).var; },
                   [&](const PredDecl& h) {
                     auto& k = std::get<PredDecl>(b);
                     return h.var == k.var && h.arity == k.arity;
                   },
                   [&](const EquivHyp& h) {
                     auto& k = std::get<EquivHyp>(b);
                     return alpha_eq(h.lhs, k.lhs) && alpha_eq(h.rhs, k.rhs);
                   },
                   [&](const InequivHyp& h) {
                     auto& k = std::get<InequivHyp>(b);
                     return alpha_eq(h.lhs, k.lhs) && alpha_eq(h.rhs, k.rhs);
                   }},
        a);
  }

  bool same_context(const TypingContext& a, const TypingContext& b) const {
    if (a.entries.size() != b.entries.size()) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i)
      if (!same_entry(a.entries[i], b.entries[i])) return false;
    return true;
  }

  // Premise i has the conclusion's context, subject and formula up to the given replacements.
  Error premise(const Derivation& d, std::size_t i, JudgementKind kind, const TypingContext* ctx, const Term* subj,
                const Formula* f) const {
    if (d.premises.size() <= i) return at(d, "missing premise");
    const Judgement& p = d.premises[i].conclusion;
    if (p.kind != kind) return at(d, fmt::format("premise {} has the wrong judgement form", i + 1));
    if (!same_context(p.context, ctx ? *ctx : d.conclusion.context))
      return at(d, fmt::format("premise {} has the wrong context", i + 1));
    if (!alpha_eq(p.subject, subj ? *subj : d.conclusion.subject))
      return at(d, fmt::format("premise {} has the wrong subject", i + 1));
    if (!equiv(p.formula, f ? *f : d.conclusion.formula))
      return at(d, fmt::format("premise {} has the wrong formula", i + 1));
    return std::nullopt;
  }

  Error arity(const Derivation& d, std::size_t n) const {
    if (d.premises.size() != n) return at(d, fmt::format("expected {} premise(s)", n));
    return std::nullopt;
  }

  const Evidence* evidence(const Derivation& d, EvidenceKind k, std::size_t nth = 0) const {
    for (const auto& e : d.evidence)
      if (e.kind == k && nth-- == 0) return &e;
    return nullptr;
  }

  static bool is_kind(const Judgement& j, JudgementKind k) { return j.kind == k; }

  // Left rules: the premise context replaces the target hypothesis by `with`.
  Error left(const Derivation& d, const std::function<std::optional<std::vector<ContextEntry>>(
                                      const LambdaHyp&, std::size_t, const Evidence*)>& expand) const {
    const Judgement& c = d.conclusion;
    if (!is_kind(c, JudgementKind::Term)) return at(d, "left rules conclude term judgements");
    const Evidence* target = evidence(d, EvidenceKind::Target);
    if (!target) return at(d, "no target hypothesis recorded");
    std::optional<std::size_t> idx;
    for (std::size_t i = c.context.entries.size(); i-- > 0;)
      if (auto* h = std::get_if<LambdaHyp>(&c.context.entries[i]); h && h->var == target->var) {
        idx = i;
        break;
      }
    if (!idx) return at(d, "target hypothesis not found");
    auto with = expand(std::get<LambdaHyp>(c.context.entries[*idx]), *idx, evidence(d, EvidenceKind::Fresh));
    if (!with) return at(d, "the hypothesis does not have the required shape");
    TypingContext g;
    g.entries.assign(c.context.entries.begin(), c.context.entries.begin() + static_cast<std::ptrdiff_t>(*idx));
    for (auto& e : *with) g.entries.push_back(std::move(e));
    g.entries.insert(g.entries.end(), c.context.entries.begin() + static_cast<std::ptrdiff_t>(*idx) + 1,
                     c.context.entries.end());
    if (auto e = arity(d, 1)) return e;
    return premise(d, 0, JudgementKind::Term, &g, nullptr, nullptr);
  }

  Error decide_again(const Derivation& d, const Claim& claim, const TypingContext& g) const {
    Verdict v = decide(restrict_to_equational(g), claim.lhs, claim.rhs, claim.polarity, o_.budget);
    if (v.kind != VerdictKind::Proved) return at(d, "the recorded equivalence does not replay");
    return std::nullopt;
  }

  Error rule(const Derivation& d) {
    const Judgement& c = d.conclusion;
    const TypingContext& g = c.context;
    const std::string& r = d.rule;
    auto need_value = [&]() -> Error {
      if (!is_kind(c, JudgementKind::Value) || !is_value(c.subject)) return at(d, "expected a value judgement");
      return std::nullopt;
    };
    auto need_term = [&]() -> Error {
      if (!is_kind(c, JudgementKind::Term)) return at(d, "expected a term judgement");
      return std::nullopt;
    };
    Formula u = unfold(c.formula);

    if (r == "ax") {
      if (auto e = need_value()) return e;
      if (auto e = arity(d, 0)) return e;
      auto* x = as<LambdaVar>(value_of(c.subject));
      if (!x) return at(d, "subject is not a variable");
      const Formula* ty = g.lambda_type(x->name);
      if (!ty || !equiv(*ty, c.formula)) return at(d, "no matching hypothesis");
      return std::nullopt;
    }
    if (r == "↑") {
      if (auto e = need_term()) return e;
      if (!is_value(c.subject)) return at(d, "subject is not a value");
      if (auto e = arity(d, 1)) return e;
      return premise(d, 0, JudgementKind::Value, nullptr, nullptr, nullptr);
    }
    if (r == "↓") {
      if (auto e = need_value()) return e;
      if (auto e = arity(d, 1)) return e;
      return premise(d, 0, JudgementKind::Term, nullptr, nullptr, nullptr);
    }
    if (r == "⇒ᵢ") {
      if (auto e = need_value()) return e;
      auto* l = as<Lambda>(value_of(c.subject));
      auto* ar = as<Arrow>(u);
      if (!l || !ar) return at(d, "expected λx t : A ⇒ B");
      const Evidence* f = evidence(d, EvidenceKind::Fresh);
      if (!f) return at(d, "no bound variable recorded");
      if (g.free_vars().terms.lambda.contains(f->var)) return at(d, f->var + " is not fresh");
      TypingContext g2 = g.with(LambdaHyp{f->var, ar->dom});
      Term body = subst(l->body, LambdaSubst{l->param, mk::var(f->var)});
      if (auto e = arity(d, 1)) return e;
      return premise(d, 0, JudgementKind::Term, &g2, &body, &ar->cod);
    }
    if (r == "⇒ₑ") {
      if (auto e = need_term()) return e;
      auto* ap = as<App>(c.subject);
      if (!ap) return at(d, "subject is not an application");
      if (auto e = arity(d, 2)) return e;
      const Judgement& p0 = d.premises[0].conclusion;
      auto* ar = as<Arrow>(unfold(p0.formula));
      if (!ar) return at(d, "function premise is not an arrow");
      if (auto e = premise(d, 0, JudgementKind::Term, nullptr, &ap->fun, &p0.formula)) return e;
      if (!equiv(ar->cod, c.formula)) return at(d, "codomain mismatch");
      return premise(d, 1, JudgementKind::Term, nullptr, &ap->arg, &ar->dom);
    }
    if (r == "μ") {
      if (auto e = need_term()) return e;
      auto* m = as<Mu>(c.subject);
      if (!m) return at(d, "subject is not a μ-abstraction");
      const Evidence* f = evidence(d, EvidenceKind::Fresh);
      if (!f) return at(d, "no bound variable recorded");
      if (g.free_vars().terms.mu.contains(f->var)) return at(d, f->var + " is not fresh");
      TypingContext g2 = g.with(StackHyp{f->var, c.formula});
      Term body = subst(m->body, StackSubst{m->var, mk::svar(f->var)});
      if (auto e = arity(d, 1)) return e;
      return premise(d, 0, JudgementKind::Term, &g2, &body, nullptr);
    }
    if (r == "∗") {
      if (auto e = need_term()) return e;
      auto* p = as<Proc>(c.subject);
      if (!p) return at(d, "subject is not a process");
      auto* sv = as<StackVar>(p->process.stack);
      if (!sv) return at(d, "stack is not a variable");
      const Formula* ty = g.stack_type(sv->name);
      if (!ty) return at(d, "stack variable has no type");
      if (auto e = arity(d, 1)) return e;
      return premise(d, 0, JudgementKind::Term, nullptr, &p->process.term, ty);
    }
    if (r == "∈ᵢ") {
      if (auto e = need_value()) return e;
      auto* m = as<Member>(u);
      if (!m || !alpha_eq(m->term, c.subject)) return at(d, "expected v : v ∈ A");
      if (auto e = arity(d, 1)) return e;
      return premise(d, 0, JudgementKind::Value, nullptr, nullptr, &m->type);
    }
    if (r == "∈ₑ") {
      return left(d, [&](const LambdaHyp& h, std::size_t, const Evidence*) -> std::optional<std::vector<ContextEntry>> {
        auto* m = as<Member>(unfold(h.type));
        if (!m) return std::nullopt;
        return std::vector<ContextEntry>{LambdaHyp{h.var, m->type}, EquivHyp{mk::val(mk::var(h.var)), m->term}};
      });
    }
    if (r == "↾ₑ") {
      return left(d, [&](const LambdaHyp& h, std::size_t, const Evidence*) -> std::optional<std::vector<ContextEntry>> {
        auto* rr = as<Restrict>(unfold(h.type));
        if (!rr) return std::nullopt;
        return std::vector<ContextEntry>{LambdaHyp{h.var, rr->type}, EquivHyp{rr->lhs, rr->rhs}};
      });
    }
    if (r == "{}ₑ") {
      return left(d, [&](const LambdaHyp& h, std::size_t, const Evidence*) -> std::optional<std::vector<ContextEntry>> {
        auto* rt = as<RecordTy>(unfold(h.type));
        if (!rt || !rt->fields.empty()) return std::nullopt;
        return std::vector<ContextEntry>{LambdaHyp{h.var, h.type}, EquivHyp{mk::val(mk::var(h.var)), mk::val(mk::unit())}};
      });
    }
    if (r == "∃ₑ") {
      return left(d, [&](const LambdaHyp& h, std::size_t, const Evidence* f) -> std::optional<std::vector<ContextEntry>> {
        auto* q = as<ExistsTerm>(unfold(h.type));
        if (!q || !f) return std::nullopt;
        FormulaFV avoid = g.free_vars();
        if (avoid.terms.term.contains(f->var) || c.formula->fv.terms.term.contains(f->var) ||
            c.subject->fv.term.contains(f->var))
          return std::nullopt;
        return std::vector<ContextEntry>{TermDecl{f->var},
                                         LambdaHyp{h.var, formula_subst(q->body, TermSubst{q->var, mk::tvar(f->var)})}};
      });
    }
    if (r == "∃_E") {
      return left(d, [&](const LambdaHyp& h, std::size_t, const Evidence* f) -> std::optional<std::vector<ContextEntry>> {
        auto* q = as<ExistsPred>(unfold(h.type));
        if (!q || !f) return std::nullopt;
        if (g.free_vars().preds.contains(f->var) || c.formula->fv.preds.contains(f->var)) return std::nullopt;
        return std::vector<ContextEntry>{PredDecl{f->var, q->arity}, LambdaHyp{h.var, rename_pred(*q, f->var)}};
      });
    }
    if (r == "↾ᵢ") {
      if (auto e = need_term()) return e;
      auto* rr = as<Restrict>(u);
      if (!rr) return at(d, "formula is not a restriction");
      if (!g.has_equation(rr->lhs, rr->rhs)) return at(d, "the equation is not a hypothesis");
      if (auto e = arity(d, 1)) return e;
      return premise(d, 0, JudgementKind::Term, nullptr, nullptr, &rr->type);
    }
    if (r == "∀ᵢ") {
      if (auto e = need_value()) return e;
      auto* q = as<ForallTerm>(u);
      const Evidence* f = evidence(d, EvidenceKind::Fresh);
      if (!q || !f) return at(d, "expected ∀a A and a fresh variable");
      if (g.free_vars().terms.term.contains(f->var)) return at(d, f->var + " is free in the context");
      TypingContext g2 = g.with(TermDecl{f->var});
      Formula body = formula_subst(q->body, TermSubst{q->var, mk::tvar(f->var)});
      if (auto e = arity(d, 1)) return e;
      return premise(d, 0, JudgementKind::Value, &g2, nullptr, &body);
    }
    if (r == "∀_I") {
      if (auto e = need_value()) return e;
      auto* q = as<ForallPred>(u);
      const Evidence* f = evidence(d, EvidenceKind::Fresh);
      if (!q || !f) return at(d, "expected ∀X A and a fresh variable");
      if (g.free_vars().preds.contains(f->var)) return at(d, f->var + " is free in the context");
      TypingContext g2 = g.with(PredDecl{f->var, q->arity});
      Formula body = rename_pred(*q, f->var);
      if (auto e = arity(d, 1)) return e;
      return premise(d, 0, JudgementKind::Value, &g2, nullptr, &body);
    }
    if (r == "∀ₑ" || r == "∃ᵢ") {
      if (auto e = need_term()) return e;
      const Evidence* w = evidence(d, EvidenceKind::Witness);
      if (!w || !w->term) return at(d, "no term witness recorded");
      if (auto e = arity(d, 1)) return e;
      if (r == "∀ₑ") {
        auto* q = as<ForallTerm>(unfold(d.premises[0].conclusion.formula));
        if (!q) return at(d, "premise is not universally quantified");
        if (!equiv(formula_subst(q->body, TermSubst{q->var, *w->term}), c.formula)) return at(d, "wrong instance");
        return premise(d, 0, JudgementKind::Term, nullptr, nullptr, &d.premises[0].conclusion.formula);
      }
      auto* q = as<ExistsTerm>(u);
      if (!q) return at(d, "formula is not existentially quantified");
      Formula inst = formula_subst(q->body, TermSubst{q->var, *w->term});
      return premise(d, 0, JudgementKind::Term, nullptr, nullptr, &inst);
    }
    if (r == "∀_E" || r == "∃_I") {
      if (auto e = need_term()) return e;
      const Evidence* w = evidence(d, EvidenceKind::Witness);
      if (!w || !w->pred) return at(d, "no predicate witness recorded");
      if (auto e = arity(d, 1)) return e;
      try {
        if (r == "∀_E") {
          auto* q = as<ForallPred>(unfold(d.premises[0].conclusion.formula));
          if (!q || static_cast<int>(w->pred->params.size()) != q->arity) return at(d, "premise does not match");
          if (!equiv(formula_subst(q->body, std::pair{q->var, *w->pred}), c.formula)) return at(d, "wrong instance");
          return premise(d, 0, JudgementKind::Term, nullptr, nullptr, &d.premises[0].conclusion.formula);
        }
        auto* q = as<ExistsPred>(u);
        if (!q || static_cast<int>(w->pred->params.size()) != q->arity) return at(d, "formula does not match");
        Formula inst = formula_subst(q->body, std::pair{q->var, *w->pred});
        return premise(d, 0, JudgementKind::Term, nullptr, nullptr, &inst);
      } catch (const ArityMismatch& e) {
        return at(d, e.what());
      }
    }
    if (r == "×ᵢ") {
      if (auto e = need_value()) return e;
      auto* rec = as<Record>(value_of(c.subject));
      auto* rt = as<RecordTy>(u);
      if (!rec || !rt || rec->fields.size() != rt->fields.size()) return at(d, "record and record type differ");
      if (auto e = arity(d, rec->fields.size())) return e;
      std::size_t i = 0;
      for (const auto& [l, w] : rec->fields) {
        auto it = rt->fields.find(l);
        if (it == rt->fields.end()) return at(d, "field " + l + " is not in the type");
        Term wt = mk::val(w);
        if (auto e = premise(d, i++, JudgementKind::Value, nullptr, &wt, &it->second)) return e;
      }
      return std::nullopt;
    }
    if (r == "×ₑ") {
      if (auto e = need_term()) return e;
      auto* p = as<Proj>(c.subject);
      if (!p) return at(d, "subject is not a projection");
      if (auto e = arity(d, 1)) return e;
      auto* rt = as<RecordTy>(unfold(d.premises[0].conclusion.formula));
      if (!rt) return at(d, "premise is not a record type");
      auto it = rt->fields.find(p->label);
      if (it == rt->fields.end() || !equiv(it->second, c.formula)) return at(d, "field type mismatch");
      Term v = mk::val(p->record);
      return premise(d, 0, JudgementKind::Value, nullptr, &v, &d.premises[0].conclusion.formula);
    }
    if (r == "+ᵢ") {
      if (auto e = need_value()) return e;
      auto* k = as<Ctor>(value_of(c.subject));
      auto* vt = as<VariantTy>(u);
      if (!k || !vt) return at(d, "expected C[v] : [C : A …]");
      auto it = vt->ctors.find(k->name);
      if (it == vt->ctors.end()) return at(d, "constructor not in the type");
      if (auto e = arity(d, 1)) return e;
      Term w = mk::val(k->payload);
      return premise(d, 0, JudgementKind::Value, nullptr, &w, &it->second);
    }
    if (r == "+ₑ") {
      if (auto e = need_term()) return e;
      auto* cs = as<Case>(c.subject);
      if (!cs) return at(d, "subject is not a case analysis");
      if (d.premises.empty()) return at(d, "missing premises");
      auto* vt = as<VariantTy>(unfold(d.premises[0].conclusion.formula));
      if (!vt) return at(d, "scrutinee premise is not a variant type");
      Term v = mk::val(cs->scrutinee);
      if (auto e = premise(d, 0, JudgementKind::Value, nullptr, &v, &d.premises[0].conclusion.formula)) return e;
      if (vt->ctors.size() != cs->branches.size()) return at(d, "branches do not match the variant");
      if (auto e = arity(d, 1 + vt->ctors.size())) return e;
      std::size_t i = 0;
      for (const auto& [k, ak] : vt->ctors) {
        auto bt = cs->branches.find(k);
        if (bt == cs->branches.end()) return at(d, "missing branch " + k);
        const Evidence* f = evidence(d, EvidenceKind::Fresh, i);
        if (!f) return at(d, "no branch variable recorded");
        if (g.free_vars().terms.lambda.contains(f->var)) return at(d, f->var + " is not fresh");
        TypingContext g2 = g.with(LambdaHyp{f->var, ak}).with(EquivHyp{mk::val(mk::ctor(k, mk::var(f->var))), v});
        Term body = subst(bt->second.body, LambdaSubst{bt->second.var, mk::var(f->var)});
        if (auto e = premise(d, ++i, JudgementKind::Term, &g2, &body, nullptr)) return e;
      }
      return std::nullopt;
    }
    if (r == "≡ᵥₗ" || r == "≡ₜₗ" || r == "≡ᵥᵣ" || r == "≡ₜᵣ") {
      if (auto e = need_term()) return e;
      const Evidence* ev = evidence(d, EvidenceKind::Rewrite);
      if (!ev || !ev->claim) return at(d, "no rewrite recorded");
      const Term& from = ev->claim->lhs;
      const Term& to = ev->claim->rhs;
      if (!g.has_equation(from, to)) return at(d, "the equation is not a hypothesis");
      bool on_values = r == "≡ᵥₗ" || r == "≡ᵥᵣ";
      if (on_values && (!is_value(from) || !is_value(to))) return at(d, "value rewrite between non-values");
      auto bind = [&](const Term& w) -> Binding {
        if (on_values) return LambdaSubst{ev->var, value_of(w)};
        return TermSubst{ev->var, w};
      };
      if (auto e = arity(d, 1)) return e;
      if (r == "≡ᵥₗ" || r == "≡ₜₗ") {
        if (!ev->term) return at(d, "no subject template recorded");
        Term before = subst(*ev->term, bind(from));
        Term after = subst(*ev->term, bind(to));
        if (!alpha_eq(after, c.subject)) return at(d, "conclusion is not the rewritten subject");
        return premise(d, 0, JudgementKind::Term, nullptr, &before, nullptr);
      }
      if (!ev->formula) return at(d, "no formula template recorded");
      auto fbind = [&](const Term& w) -> FormulaBinding {
        if (on_values) return LambdaSubst{ev->var, value_of(w)};
        return TermSubst{ev->var, w};
      };
      Formula before = formula_subst(*ev->formula, fbind(from));
      Formula after = formula_subst(*ev->formula, fbind(to));
      if (!equiv(after, c.formula)) return at(d, "conclusion is not the rewritten formula");
      return premise(d, 0, JudgementKind::Term, nullptr, nullptr, &before);
    }
    if (r == "≡" || r == "≢") {
      if (auto e = need_term()) return e;
      const Evidence* ev = evidence(d, EvidenceKind::Decide);
      if (!ev || !ev->claim || !ev->verdict || ev->verdict->kind != VerdictKind::Proved)
        return at(d, "no equivalence certificate recorded");
      Polarity pol = r == "≡" ? Polarity::Equiv : Polarity::Inequiv;
      if (ev->claim->polarity != pol) return at(d, "certificate has the wrong polarity");
      TypingContext g2 = pol == Polarity::Equiv ? g.with(EquivHyp{ev->claim->lhs, ev->claim->rhs})
                                                : g.with(InequivHyp{ev->claim->lhs, ev->claim->rhs});
      if (auto e = arity(d, 1)) return e;
      if (auto e = premise(d, 0, JudgementKind::Term, &g2, nullptr, nullptr)) return e;
      return decide_again(d, *ev->claim, g);
    }
    if (r == "✂") {
      if (auto e = need_value()) return e;
      if (!as<Scissors>(value_of(c.subject))) return at(d, "subject is not ✂");
      if (!equiv(c.formula, sugar_bot())) return at(d, "✂ only has type ⊥");
      const Evidence* ev = evidence(d, EvidenceKind::Contradiction);
      if (!ev || !ev->verdict || ev->verdict->kind != VerdictKind::Proved) return at(d, "no contradiction recorded");
      if (context_contradictory(restrict_to_equational(g), o_.budget).kind != VerdictKind::Proved)
        return at(d, "the contradiction does not replay");
      return arity(d, 0);
    }
    if (r == "∀ᵢ,≡" || r == "Πₑ,≡") {
      if (auto e = arity(d, 1)) return e;
      return premise(d, 0, c.kind, nullptr, nullptr, nullptr);
    }
    return at(d, "unknown rule");
  }

  static Formula rename_pred(const ForallPred& q, const std::string& y) { return rename(q.var, q.arity, q.body, y); }
  static Formula rename_pred(const ExistsPred& q, const std::string& y) { return rename(q.var, q.arity, q.body, y); }
  static Formula rename(const std::string& x, int n, const Formula& body, const std::string& y) {
    if (x == y) return body;
    std::vector<std::string> params;
    std::vector<Term> args;
    for (int i = 0; i < n; ++i) {
      params.push_back("p" + std::to_string(i));
      args.push_back(mk::tvar(params.back()));
    }
    return formula_subst(body, std::pair{x, PredicateDef{params, fm::pred(y, args)}});
  }

  const CheckOptions& o_;
};

}  // namespace

std::optional<std::string> validate_explain(const Derivation& d, const CheckOptions& opts) {
  Validator v(opts);
  return v.go(d);
}

bool validate(const Derivation& d, const CheckOptions& opts) { return !validate_explain(d, opts).has_value(); }

}  // namespace svr
