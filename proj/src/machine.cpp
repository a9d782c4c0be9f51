#include "svr/machine.hpp"

#include <fmt/format.h>

#include "util.hpp"

namespace svr {

const EquivOracle& null_oracle() {
  static const NullOracle oracle;
  return oracle;
}

namespace {

Blocked stuck(StuckForm f) { return Blocked{Stuck{f}}; }
Blocked open(OpenForm f, const std::string& x) { return Blocked{OpenLambdaVar{f, x}}; }

StepResult step_value(const Value& v, const Stack& pi) {
  if (as<Scissors>(v)) return Blocked{ScissorsHit{}};
  if (auto* a = as<StackVar>(pi)) return Blocked{Final{v, a->name}};
  if (auto* f = as<Frame>(pi)) return Next{Process{f->fun, mk::push(v, f->tail)}, Rule::Pop};
  const auto& push = std::get<Push>(pi->node);
  return std::visit(
      overloaded{[&](const Lambda& l) -> StepResult {
                   return Next{Process{subst(l.body, LambdaSubst{l.param, push.head}), push.tail}, Rule::Beta};
                 },
                 [&](const LambdaVar& x) -> StepResult { return open(OpenForm::Application, x.name); },
                 [&](const Ctor&) -> StepResult { return stuck(StuckForm::CtorApplied); },
                 [&](const Record&) -> StepResult { return stuck(StuckForm::RecordApplied); },
                 [&](const Scissors&) -> StepResult { return Blocked{ScissorsHit{}}; }},
      v->node);
}

}  // namespace

StepResult step(const Process& p, const EquivOracle& oracle) {
  const Stack& pi = p.stack;
  return std::visit(
      overloaded{
          [&](const Val& v) -> StepResult { return step_value(v.value, pi); },
          [&](const TermVar& a) -> StepResult { return Blocked{OpenTermVar{a.name, pi}}; },
          [&](const App& a) -> StepResult { return Next{Process{a.arg, mk::frame(a.fun, pi)}, Rule::Push}; },
          [&](const Mu& m) -> StepResult {
            return Next{Process{subst(m.body, StackSubst{m.var, pi}), pi}, Rule::Capture};
          },
          [&](const Proc& q) -> StepResult { return Next{q.process, Rule::Restart}; },
          [&](const Proj& q) -> StepResult {
            return std::visit(
                overloaded{[&](const Record& r) -> StepResult {
                             auto it = r.fields.find(q.label);
                             if (it == r.fields.end()) return stuck(StuckForm::MissingField);
                             return Next{Process{mk::val(it->second), pi}, Rule::Project};
                           },
                           [&](const Ctor&) -> StepResult { return stuck(StuckForm::CtorProjected); },
                           [&](const Lambda&) -> StepResult { return stuck(StuckForm::LambdaProjected); },
                           [&](const LambdaVar& x) -> StepResult { return open(OpenForm::Projection, x.name); },
                           [&](const Scissors&) -> StepResult { return Blocked{ScissorsHit{}}; }},
                q.record->node);
          },
          [&](const Case& c) -> StepResult {
            return std::visit(
                overloaded{[&](const Ctor& k) -> StepResult {
                             auto it = c.branches.find(k.name);
                             if (it == c.branches.end()) return stuck(StuckForm::MissingBranch);
                             const Branch& b = it->second;
                             return Next{Process{subst(b.body, LambdaSubst{b.var, k.payload}), pi}, Rule::Match};
                           },
                           [&](const Lambda&) -> StepResult { return stuck(StuckForm::CaseOnLambda); },
                           [&](const Record&) -> StepResult { return stuck(StuckForm::CaseOnRecord); },
                           [&](const LambdaVar& x) -> StepResult { return open(OpenForm::Case, x.name); },
                           [&](const Scissors&) -> StepResult { return Blocked{ScissorsHit{}}; }},
                c.scrutinee->node);
          },
          [&](const Delta& d) -> StepResult {
            if (oracle.query(d.left, d.right) == OracleAnswer::DefinitelyInequivalent)
              return Next{Process{mk::val(d.left), pi}, Rule::DeltaFire};
            return Blocked{DeltaLike{d.left, d.right, pi}};
          },
          [&](const UnitProbe& u) -> StepResult {
            if (is_empty_record(u.arg)) return Next{Process{mk::val(u.arg), pi}, Rule::Unit};
            if (auto* x = as<LambdaVar>(u.arg)) return open(OpenForm::Unit, x->name);
            if (as<Scissors>(u.arg)) return Blocked{ScissorsHit{}};
            return stuck(StuckForm::UnitMismatch);
          }},
      p.term->node);
}

RunOutcome run(const Process& p, std::size_t fuel, const EquivOracle& oracle) {
  Process cur = p;
  for (std::size_t steps = 0;; ++steps) {
    StepResult r = step(cur, oracle);
    if (auto* b = std::get_if<Blocked>(&r)) {
      if (auto* f = std::get_if<Final>(&b->cls)) return Converged{f->value, f->stack_var, steps};
      return Halted{b->cls, steps};
    }
    if (steps == fuel) return OutOfFuel{cur};
    cur = std::move(std::get<Next>(r).process);
  }
}

std::vector<TraceEntry> trace_with_rules(const Process& p, std::size_t fuel, const EquivOracle& oracle) {
  std::vector<TraceEntry> out{TraceEntry{p, std::nullopt}};
  for (std::size_t i = 0; i < fuel; ++i) {
    StepResult r = step(out.back().process, oracle);
    auto* n = std::get_if<Next>(&r);
    if (!n) break;
    out.push_back(TraceEntry{n->process, n->rule});
  }
  return out;
}

std::vector<Process> trace(const Process& p, std::size_t fuel, const EquivOracle& oracle) {
  std::vector<Process> out;
  for (auto& e : trace_with_rules(p, fuel, oracle)) out.push_back(std::move(e.process));
  return out;
}

std::string rule_name(Rule r) {
  switch (r) {
    case Rule::Push: return "push";
    case Rule::Pop: return "pop";
    case Rule::Beta: return "beta";
    case Rule::Capture: return "capture";
    case Rule::Restart: return "restart";
    case Rule::Project: return "project";
    case Rule::Match: return "case";
    case Rule::DeltaFire: return "delta";
    case Rule::Unit: return "unit";
  }
  return "?";
}

std::string stuck_name(StuckForm f) {
  switch (f) {
    case StuckForm::CtorProjected: return "constructor projected";
    case StuckForm::LambdaProjected: return "lambda projected";
    case StuckForm::CtorApplied: return "constructor applied";
    case StuckForm::RecordApplied: return "record applied";
    case StuckForm::CaseOnLambda: return "case on lambda";
    case StuckForm::CaseOnRecord: return "case on record";
    case StuckForm::MissingBranch: return "missing branch";
    case StuckForm::MissingField: return "missing field";
    case StuckForm::UnitMismatch: return "unit mismatch";
  }
  return "?";
}

std::string open_name(OpenForm f) {
  switch (f) {
    case OpenForm::Projection: return "projection";
    case OpenForm::Application: return "application";
    case OpenForm::Case: return "case";
    case OpenForm::Unit: return "unit";
  }
  return "?";
}

std::string describe(const BlockedClass& c) {
  return std::visit(
      overloaded{[](const Final& f) { return fmt::format("final {} ∗ {}", to_string(f.value), f.stack_var); },
                 [](const Stuck& s) { return "stuck (" + stuck_name(s.form) + ")"; },
                 [](const DeltaLike& d) {
                   return fmt::format("delta-like δ({}, {}) ∗ {}", to_string(d.left), to_string(d.right),
                                      to_string(d.stack));
                 },
                 [](const OpenLambdaVar& o) { return fmt::format("open {} on {}", open_name(o.form), o.var); },
                 [](const OpenTermVar& o) { return fmt::format("open term variable {} ∗ {}", o.var, to_string(o.stack)); },
                 [](const ScissorsHit&) { return std::string("scissors reached"); }},
      c);
}

std::string describe(const RunOutcome& r) {
  return std::visit(overloaded{[](const Converged& c) {
                                 return fmt::format("converged {} ∗ {} in {} steps", to_string(c.value),
                                                    c.stack_var, c.steps);
                               },
                               [](const Halted& h) { return fmt::format("{} after {} steps", describe(h.cls), h.steps); },
                               [](const OutOfFuel& o) { return "out of fuel at " + to_string(o.last); }},
                    r);
}

std::string trace_to_text(const std::vector<TraceEntry>& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    out += fmt::format("{:>4}  {}", i, to_string(t[i].process));
    if (t[i].rule) out += "  [" + rule_name(*t[i].rule) + "]";
    out += '\n';
  }
  return out;
}

}  // namespace svr
