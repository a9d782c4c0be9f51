#pragma once

// Right-to-left call-by-value abstract machine over processes t ∗ π.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "svr/syntax.hpp"

namespace svr {

enum class Rule {
  Push,     // t u ∗ π  ≻  u ∗ [t]π
  Pop,      // v ∗ [t]π  ≻  t ∗ v.π
  Beta,     // λx t ∗ v.π  ≻  t[x := v] ∗ π
  Capture,  // μα t ∗ π  ≻  t[α := π] ∗ π
  Restart,  // p ∗ π  ≻  p
  Project,  // {l = v …}.l ∗ π  ≻  v ∗ π
  Match,    // case C[v] […] ∗ π  ≻  t[x := v] ∗ π
  DeltaFire,
  Unit,
};

enum class StuckForm {
  CtorProjected,
  LambdaProjected,
  CtorApplied,
  RecordApplied,
  CaseOnLambda,
  CaseOnRecord,
  MissingBranch,
  MissingField,
  UnitMismatch,
};

enum class OpenForm { Projection, Application, Case, Unit };

struct Final {
  Value value;
  std::string stack_var;
};
struct Stuck {
  StuckForm form;
};
struct DeltaLike {
  Value left;
  Value right;
  Stack stack;
};
struct OpenLambdaVar {
  OpenForm form;
  std::string var;
};
struct OpenTermVar {
  std::string var;
  Stack stack;
};
struct ScissorsHit {};

using BlockedClass = std::variant<Final, Stuck, DeltaLike, OpenLambdaVar, OpenTermVar, ScissorsHit>;

struct Next {
  Process process;
  Rule rule;
};
struct Blocked {
  BlockedClass cls;
};
using StepResult = std::variant<Next, Blocked>;

enum class OracleAnswer { DefinitelyInequivalent, NotKnownInequivalent };

class EquivOracle {
 public:
  virtual ~EquivOracle() = default;
  virtual OracleAnswer query(const Value& v, const Value& w) const = 0;
};

// Never claims an inequivalence.
class NullOracle : public EquivOracle {
 public:
  OracleAnswer query(const Value&, const Value&) const override { return OracleAnswer::NotKnownInequivalent; }
};

const EquivOracle& null_oracle();

StepResult step(const Process& p, const EquivOracle& oracle = null_oracle());

struct Converged {
  Value value;
  std::string stack_var;
  std::size_t steps;
};
struct Halted {
  BlockedClass cls;
  std::size_t steps;
};
struct OutOfFuel {
  Process last;
};
using RunOutcome = std::variant<Converged, Halted, OutOfFuel>;

RunOutcome run(const Process& p, std::size_t fuel, const EquivOracle& oracle = null_oracle());

struct TraceEntry {
  Process process;
  // Rule that produced this state; empty for the first.
  std::optional<Rule> rule;
};

std::vector<Process> trace(const Process& p, std::size_t fuel, const EquivOracle& oracle = null_oracle());
std::vector<TraceEntry> trace_with_rules(const Process& p, std::size_t fuel,
                                         const EquivOracle& oracle = null_oracle());

std::string rule_name(Rule r);
std::string stuck_name(StuckForm f);
std::string open_name(OpenForm f);
std::string describe(const BlockedClass& c);
std::string describe(const RunOutcome& r);

// One line per state: "<index>  <process>  [rule]".
std::string trace_to_text(const std::vector<TraceEntry>& t);

}  // namespace svr
