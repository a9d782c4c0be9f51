#pragma once

// Module-level commands behind the CLI: check, run and equiv. Each produces a
// Report that renders as text or as versioned JSON.

#include <optional>
#include <string>
#include <vector>

#include "svr/checker.hpp"
#include "svr/surface.hpp"

namespace svr {

enum class DeclStatus { Ok, Failed, AssumesTotality };

std::string status_name(DeclStatus s);

struct DeclReport {
  std::string kind;  // type, let, assert or check
  std::string name;
  DeclStatus status = DeclStatus::Ok;
  Span span;
  std::string goal;
  std::string message;
  std::vector<std::string> notes;
  std::optional<Derivation> derivation;
  bool validated = false;
  std::optional<Claim> claim;
  std::optional<Verdict> verdict;
};

struct RunReport {
  std::string main;
  std::string term;
  RunOutcome outcome;
  std::vector<TraceEntry> trace;
};

struct EquivReport {
  Claim claim;
  Verdict verdict;
  std::optional<Witness> witness;
};

struct Report {
  std::string command;
  std::string file;
  std::vector<Diagnostic> diagnostics;
  std::vector<DeclReport> decls;
  std::optional<RunReport> run;
  std::optional<EquivReport> equiv;
  std::string status;
  int exit_code = 0;
  double elapsed_ms = 0;
};

struct DriverOptions {
  Budget budget;
  bool emit_derivations = false;
};

// The typing context after every declaration of a module, in order.
struct ModuleContext {
  ElaboratedModule module;
  TypingContext context;
};

// Parses and desugars a file's text; diagnostics are left in module.diagnostics.
ModuleContext load_module(std::string_view source);

Report cmd_check(const std::string& path, const DriverOptions& opts);
Report cmd_run(const std::string& path, const std::string& main, std::size_t fuel, bool with_trace);
Report cmd_equiv(const std::string& path, const std::string& lhs, const std::string& rhs, const DriverOptions& opts);

// Same entry points on in-memory sources; `path` is only used in messages.
Report check_source(const std::string& path, std::string_view source, const DriverOptions& opts);
Report run_source(const std::string& path, std::string_view source, const std::string& main, std::size_t fuel,
                  bool with_trace);
Report equiv_source(const std::string& path, std::string_view source, const std::string& lhs,
                    const std::string& rhs, const DriverOptions& opts);

// Replaces the body of every typed definition that checks by its elaborated
// form, in which ✂ proving an equation has become {}.
void elaborate_proofs(ElaboratedModule& m, const DriverOptions& opts);

// The closed program a definition denotes, with every global it uses inlined.
std::optional<Term> closed_program(const ElaboratedModule& m, const std::string& name);

std::string report_json(const Report& r, bool emit_derivations, bool with_timing = true);
std::string report_text(const Report& r, bool emit_derivations);
std::string derivation_text(const Derivation& d);
std::string certificate_text(const Verdict& v);

}  // namespace svr
