#include "svr/driver.hpp"

#include <fmt/format.h>

#include <chrono>
#include <fstream>
#include <sstream>

#include "util.hpp"

namespace svr {

namespace {

using Clock = std::chrono::steady_clock;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Report usage_error(const std::string& command, const std::string& path, const std::string& msg) {
  Report r;
  r.command = command;
  r.file = path;
  r.diagnostics.push_back({Severity::Error, {}, msg, std::nullopt});
  r.status = "error";
  r.exit_code = 2;
  return r;
}

void finish(Report& r, Clock::time_point start) {
  r.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool has_errors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    if (d.severity == Severity::Error) return true;
  return false;
}

// Innermost claim of a failure chain.
std::optional<Claim> failure_claim(const CheckFailure& f) {
  std::optional<Claim> c = f.claim;
  for (auto p = f.cause; p; p = p->cause)
    if (p->claim) c = p->claim;
  return c;
}

Term global_ref(const std::string& name, GlobalKind k) {
  return k == GlobalKind::Value ? mk::val(mk::var(name)) : mk::tvar(name);
}

struct DefInfo {
  const CoreDef* def;
  TypingContext before;
};

class ModuleChecker {
 public:
  ModuleChecker(const ElaboratedModule& m, const DriverOptions& o, bool check = true) : check_(check) {
    opts_.types = &m.types;
    opts_.hints = &m.hints;
    opts_.term_types = &term_types_;
    opts_.budget = o.budget;
  }
  ModuleChecker(const ModuleChecker&) = delete;
  ModuleChecker& operator=(const ModuleChecker&) = delete;

  TypingContext g;
  // Bodies of the definitions that checked, as the checker elaborated them.
  std::map<std::string, Term> elaborated;

  DeclReport item(const CoreItem& it) {
    return std::visit([&](const auto& x) { return visit(x); }, it);
  }

 private:
  DeclReport visit(const CoreTypeDef& t) {
    DeclReport r;
    r.kind = "type";
    r.name = t.name;
    r.span = t.span;
    r.goal = to_string(t.body);
    return r;
  }

  DeclReport visit(const CoreDef& d) {
    DeclReport r;
    r.kind = "let";
    r.name = d.name;
    r.span = d.span;
    defs_[d.name] = {&d, g};
    if (d.goal) {
      r.goal = to_string(*d.goal);
      if (check_) check_def(d, *d.goal, g, r);
    }
    if (d.rec) {
      r.notes.push_back("assumes-totality: " + d.name + " is recursive and its termination is not checked");
      if (r.status == DeclStatus::Ok) r.status = DeclStatus::AssumesTotality;
    }
    extend(d);
    return r;
  }

  DeclReport visit(const CoreAssert& a) {
    DeclReport r;
    r.kind = "assert";
    r.span = a.span;
    r.name = fmt::format("{} {} {}", to_string(a.lhs), polarity_symbol(a.polarity), to_string(a.rhs));
    r.claim = Claim{a.lhs, a.rhs, a.polarity};
    r.verdict = decide(restrict_to_equational(g), a.lhs, a.rhs, a.polarity, opts_.budget);
    if (r.verdict->kind != VerdictKind::Proved) {
      r.status = DeclStatus::Failed;
      r.message = r.verdict->kind == VerdictKind::Refuted ? "the assertion is refuted" : "the assertion could not be decided";
    }
    return r;
  }

  DeclReport visit(const CoreGoal& c) {
    DeclReport r;
    r.kind = "check";
    r.name = c.name;
    r.span = c.span;
    r.goal = to_string(c.goal);
    const DefInfo& info = defs_.at(c.name);
    check_def(*info.def, c.goal, info.before, r);
    return r;
  }

  void check_def(const CoreDef& d, const Formula& goal, const TypingContext& before, DeclReport& r) {
    TypingContext gc = before;
    if (d.rec) gc = gc.with(LambdaHyp{d.name, goal});
    CheckResult res = is_value(d.body) ? check_value(gc, value_of(d.body), goal, opts_)
                                       : check_term(gc, d.body, goal, opts_);
    if (!res.ok()) {
      r.status = DeclStatus::Failed;
      r.message = describe(*res.failure);
      r.claim = failure_claim(*res.failure);
      if (r.claim) r.verdict = decide(restrict_to_equational(gc), r.claim->lhs, r.claim->rhs, r.claim->polarity, opts_.budget);
      return;
    }
    if (&before == &g) elaborated[d.name] = res.derivation->conclusion.subject;
    if (auto err = validate_explain(*res.derivation, opts_)) {
      r.status = DeclStatus::Failed;
      r.message = "the derivation does not replay: " + *err;
    } else {
      r.validated = true;
    }
    r.derivation = std::move(res.derivation);
  }

  void extend(const CoreDef& d) {
    if (d.kind == GlobalKind::Value) {
      g = g.with(LambdaHyp{d.name, d.goal ? *d.goal : sugar_top()});
    } else {
      g = g.with(TermDecl{d.name});
      if (d.goal) term_types_[d.name] = *d.goal;
    }
    g = g.with(EquivHyp{global_ref(d.name, d.kind), d.body});
  }

  bool check_;
  std::map<std::string, Formula> term_types_;
  CheckOptions opts_;
  std::map<std::string, DefInfo> defs_;
};

std::optional<std::pair<Term, std::vector<Diagnostic>>> query_term(const ElaboratedModule& m, const std::string& text,
                                                                   const std::string& what) {
  auto [e, diags] = parse_expression(text);
  if (!e) {
    for (auto& d : diags) d.message = what + ": " + d.message;
    return std::pair{Term{}, diags};
  }
  auto [t, more] = desugar_query(m, *e);
  for (auto& d : more) d.message = what + ": " + d.message;
  return std::pair{t, more};
}

}  // namespace

std::string status_name(DeclStatus s) {
  switch (s) {
    case DeclStatus::Ok: return "ok";
    case DeclStatus::Failed: return "failed";
    case DeclStatus::AssumesTotality: return "assumes-totality";
  }
  return "failed";
}

ModuleContext load_module(std::string_view source) {
  ModuleContext mc;
  ParseResult p = parse(source);
  mc.module = desugar(p.module);
  mc.module.diagnostics.insert(mc.module.diagnostics.begin(), p.diagnostics.begin(), p.diagnostics.end());
  ModuleChecker mcheck(mc.module, DriverOptions{}, false);
  for (const auto& it : mc.module.items)
    if (std::holds_alternative<CoreDef>(it)) mcheck.item(it);
  mc.context = mcheck.g;
  return mc;
}

Report check_source(const std::string& path, std::string_view source, const DriverOptions& opts) {
  auto start = Clock::now();
  Report r;
  r.command = "check";
  r.file = path;
  ParseResult p = parse(source);
  r.diagnostics = p.diagnostics;
  ElaboratedModule m = desugar(p.module);
  r.diagnostics.insert(r.diagnostics.end(), m.diagnostics.begin(), m.diagnostics.end());
  ModuleChecker mc(m, opts);
  for (const auto& it : m.items) r.decls.push_back(mc.item(it));
  bool failed = has_errors(r.diagnostics);
  for (const auto& d : r.decls) failed = failed || d.status == DeclStatus::Failed;
  r.status = failed ? "failed" : "ok";
  r.exit_code = failed ? 1 : 0;
  finish(r, start);
  return r;
}

Report cmd_check(const std::string& path, const DriverOptions& opts) {
  auto src = read_file(path);
  if (!src) return usage_error("check", path, "cannot read " + path);
  return check_source(path, *src, opts);
}

namespace {

Term inline_defs(Term t, const std::vector<const CoreDef*>& defs) {
  for (auto it = defs.rbegin(); it != defs.rend(); ++it) {
    const CoreDef& d = **it;
    if (d.kind == GlobalKind::Value) {
      t = subst(t, LambdaSubst{d.name, value_of(d.runtime)});
    } else {
      t = subst(t, TermSubst{d.name, d.runtime});
    }
  }
  return t;
}

Term inline_globals(const ElaboratedModule& m, const Term& t) {
  std::vector<const CoreDef*> defs;
  for (const auto& it : m.items)
    if (auto* d = std::get_if<CoreDef>(&it)) defs.push_back(d);
  return inline_defs(t, defs);
}

}  // namespace

void elaborate_proofs(ElaboratedModule& m, const DriverOptions& opts) {
  ModuleChecker mc(m, opts);
  for (const auto& it : m.items)
    if (std::holds_alternative<CoreDef>(it)) mc.item(it);
  for (auto& it : m.items) {
    auto* d = std::get_if<CoreDef>(&it);
    if (!d) continue;
    auto e = mc.elaborated.find(d->name);
    if (e == mc.elaborated.end()) continue;
    d->body = e->second;
    d->runtime = d->rec ? mk::val(fixpoint(d->name, value_of(e->second))) : e->second;
  }
}

std::optional<Term> closed_program(const ElaboratedModule& m, const std::string& name) {
  std::vector<const CoreDef*> defs;
  for (const auto& it : m.items)
    if (auto* d = std::get_if<CoreDef>(&it)) {
      if (d->name == name) return inline_defs(d->runtime, defs);
      defs.push_back(d);
    }
  return std::nullopt;
}

Report run_source(const std::string& path, std::string_view source, const std::string& main, std::size_t fuel,
                  bool with_trace) {
  auto start = Clock::now();
  Report r;
  r.command = "run";
  r.file = path;
  ParseResult p = parse(source);
  r.diagnostics = p.diagnostics;
  ElaboratedModule m = desugar(p.module);
  r.diagnostics.insert(r.diagnostics.end(), m.diagnostics.begin(), m.diagnostics.end());
  if (has_errors(r.diagnostics)) {
    r.status = "failed";
    r.exit_code = 1;
    finish(r, start);
    return r;
  }
  elaborate_proofs(m, DriverOptions{});
  auto t = closed_program(m, main);
  if (!t) {
    r.diagnostics.push_back({Severity::Error, {}, "no definition named " + main, std::nullopt});
    r.status = "failed";
    r.exit_code = 1;
    finish(r, start);
    return r;
  }
  if (!free_vars(*t).closed()) {
    r.diagnostics.push_back({Severity::Error, {}, main + " is not closed", std::nullopt});
    r.status = "failed";
    r.exit_code = 1;
    finish(r, start);
    return r;
  }
  Process proc{*t, mk::svar("α")};
  RunReport run{main, to_string(*t), svr::run(proc, fuel), {}};
  if (with_trace) run.trace = trace_with_rules(proc, fuel);
  std::visit(overloaded{[&](const Converged&) {
                          r.status = "converged";
                          r.exit_code = 0;
                        },
                        [&](const OutOfFuel&) {
                          r.status = "out-of-fuel";
                          r.exit_code = 0;
                        },
                        [&](const Halted& h) {
                          r.status = std::holds_alternative<Stuck>(h.cls)        ? "stuck"
                                     : std::holds_alternative<ScissorsHit>(h.cls) ? "scissors"
                                                                                  : "blocked";
                          r.exit_code = 1;
                        }},
             run.outcome);
  r.run = std::move(run);
  finish(r, start);
  return r;
}

Report cmd_run(const std::string& path, const std::string& main, std::size_t fuel, bool with_trace) {
  auto src = read_file(path);
  if (!src) return usage_error("run", path, "cannot read " + path);
  return run_source(path, *src, main, fuel, with_trace);
}

Report equiv_source(const std::string& path, std::string_view source, const std::string& lhs,
                    const std::string& rhs, const DriverOptions& opts) {
  auto start = Clock::now();
  Report r;
  r.command = "equiv";
  r.file = path;
  ParseResult p = parse(source);
  r.diagnostics = p.diagnostics;
  ElaboratedModule m = desugar(p.module);
  r.diagnostics.insert(r.diagnostics.end(), m.diagnostics.begin(), m.diagnostics.end());
  auto l = query_term(m, lhs, "--lhs");
  auto rr = query_term(m, rhs, "--rhs");
  r.diagnostics.insert(r.diagnostics.end(), l->second.begin(), l->second.end());
  r.diagnostics.insert(r.diagnostics.end(), rr->second.begin(), rr->second.end());
  if (has_errors(r.diagnostics) || !l->first || !rr->first) {
    r.status = "failed";
    r.exit_code = 1;
    finish(r, start);
    return r;
  }
  ModuleChecker mc(m, opts, false);
  for (const auto& it : m.items)
    if (std::holds_alternative<CoreDef>(it)) mc.item(it);
  EquivReport e;
  e.claim = Claim{l->first, rr->first, Polarity::Equiv};
  e.verdict = decide(restrict_to_equational(mc.g), l->first, rr->first, Polarity::Equiv, opts.budget);
  if (e.verdict.kind != VerdictKind::Proved) {
    e.witness = search_inequivalence(inline_globals(m, l->first), inline_globals(m, rr->first), opts.budget);
  }
  r.status = verdict_name(e.verdict.kind);
  r.exit_code = 0;
  r.equiv = std::move(e);
  finish(r, start);
  return r;
}

Report cmd_equiv(const std::string& path, const std::string& lhs, const std::string& rhs, const DriverOptions& opts) {
  auto src = read_file(path);
  if (!src) return usage_error("equiv", path, "cannot read " + path);
  return equiv_source(path, *src, lhs, rhs, opts);
}

}  // namespace svr
