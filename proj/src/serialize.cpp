#include <fmt/format.h>

#include <json.hpp>

#include "svr/driver.hpp"
#include "util.hpp"

namespace svr {

namespace {

using json = nlohmann::ordered_json;

std::string evidence_kind(EvidenceKind k) {
  switch (k) {
    case EvidenceKind::Fresh: return "fresh";
    case EvidenceKind::Target: return "target";
    case EvidenceKind::Decide: return "decide";
    case EvidenceKind::Contradiction: return "contradiction";
    case EvidenceKind::Witness: return "witness";
    case EvidenceKind::Rewrite: return "rewrite";
  }
  return "?";
}

std::string claim_text(const Claim& c) {
  return fmt::format("{} {} {}", to_string(c.lhs), polarity_symbol(c.polarity), to_string(c.rhs));
}

json certificate_json(const Verdict& v) {
  json j;
  j["verdict"] = verdict_name(v.kind);
  if (!v.certificate.summary.empty()) j["summary"] = v.certificate.summary;
  json chain = json::array();
  for (const auto& s : v.certificate.chain)
    chain.push_back({{"axiom", s.axiom},
                     {"position", s.position},
                     {"before", to_string(s.before)},
                     {"after", to_string(s.after)}});
  j["chain"] = chain;
  if (v.certificate.clash)
    j["clash"] = {{"kind", v.certificate.clash->kind},
                  {"lhs", to_string(v.certificate.clash->lhs)},
                  {"rhs", to_string(v.certificate.clash->rhs)}};
  return j;
}

json evidence_json(const Evidence& e) {
  json j;
  j["kind"] = evidence_kind(e.kind);
  if (!e.var.empty()) j["var"] = e.var;
  if (e.claim) j["claim"] = claim_text(*e.claim);
  if (e.verdict) j["verdict"] = verdict_name(e.verdict->kind);
  if (e.term) j["term"] = to_string(*e.term);
  if (e.pred) {
    std::string ps;
    for (const auto& p : e.pred->params) ps += (ps.empty() ? "" : " ") + p;
    j["predicate"] = fmt::format("({}, {})", ps, to_string(e.pred->body));
  }
  if (e.formula) j["formula"] = to_string(*e.formula);
  return j;
}

json derivation_json(const Derivation& d) {
  json j;
  j["rule"] = d.rule;
  j["judgement"] = to_string(d.conclusion);
  if (!d.evidence.empty()) {
    json ev = json::array();
    for (const auto& e : d.evidence) ev.push_back(evidence_json(e));
    j["evidence"] = ev;
  }
  json ps = json::array();
  for (const auto& p : d.premises) ps.push_back(derivation_json(p));
  j["premises"] = ps;
  return j;
}

json span_json(const Span& s) { return {{"line", s.line}, {"column", s.column}, {"begin", s.begin}, {"end", s.end}}; }

json witness_json(const Witness& w) {
  json subst = json::array();
  for (const auto& [x, t] : w.substitution) subst.push_back({{"var", x}, {"term", to_string(t)}});
  return {{"stack", to_string(w.context)},
          {"substitution", subst},
          {"left_converges", w.left_converges},
          {"sound", w.sound},
          {"left_steps", w.left_trace.size()},
          {"right_steps", w.right_trace.size()}};
}

json outcome_json(const RunOutcome& o) {
  return std::visit(overloaded{[](const Converged& c) -> json {
                                 return {{"kind", "converged"},
                                         {"value", to_string(c.value)},
                                         {"stack", c.stack_var},
                                         {"steps", c.steps}};
                               },
                               [](const Halted& h) -> json {
                                 return {{"kind", "halted"}, {"state", describe(h.cls)}, {"steps", h.steps}};
                               },
                               [](const OutOfFuel& f) -> json {
                                 return {{"kind", "out-of-fuel"}, {"last", to_string(f.last)}};
                               }},
                    o);
}

std::string indent(const std::string& text, const std::string& pad) {
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    out += pad + text.substr(start, nl - start) + "\n";
    start = nl + 1;
  }
  return out;
}

void derivation_lines(const Derivation& d, int depth, std::string& out) {
  out += fmt::format("{}[{}] {}\n", std::string(2 * depth, ' '), d.rule, to_string(d.conclusion));
  for (const auto& p : d.premises) derivation_lines(p, depth + 1, out);
}

}  // namespace

std::string derivation_text(const Derivation& d) {
  std::string out;
  derivation_lines(d, 0, out);
  return out;
}

std::string certificate_text(const Verdict& v) {
  std::string out = verdict_name(v.kind) + "\n";
  if (!v.certificate.summary.empty()) out += "  " + v.certificate.summary + "\n";
  for (const auto& s : v.certificate.chain)
    out += fmt::format("  {} ⟶ {}   [{}{}]\n", to_string(s.before), to_string(s.after), s.axiom,
                       s.position.empty() ? "" : " at " + s.position);
  if (v.certificate.clash)
    out += fmt::format("  clash ({}): {} vs {}\n", v.certificate.clash->kind, to_string(v.certificate.clash->lhs),
                       to_string(v.certificate.clash->rhs));
  return out;
}

std::string report_json(const Report& r, bool emit_derivations, bool with_timing) {
  json j;
  j["schema"] = 1;
  j["command"] = r.command;
  j["file"] = r.file;
  j["status"] = r.status;
  j["exit_code"] = r.exit_code;
  json diags = json::array();
  for (const auto& d : r.diagnostics)
    diags.push_back({{"severity", severity_name(d.severity)}, {"message", d.message}, {"span", span_json(d.span)}});
  j["diagnostics"] = diags;
  if (r.command == "check") {
    json decls = json::array();
    for (const auto& d : r.decls) {
      json x;
      x["kind"] = d.kind;
      x["name"] = d.name;
      x["status"] = status_name(d.status);
      x["span"] = span_json(d.span);
      if (!d.goal.empty()) x["goal"] = d.goal;
      if (!d.message.empty()) x["message"] = d.message;
      if (!d.notes.empty()) x["notes"] = d.notes;
      if (d.derivation) {
        x["derivation_size"] = derivation_size(*d.derivation);
        x["validated"] = d.validated;
        if (emit_derivations) x["derivation"] = derivation_json(*d.derivation);
      }
      if (d.claim) x["claim"] = claim_text(*d.claim);
      if (d.verdict) x["certificate"] = certificate_json(*d.verdict);
      decls.push_back(x);
    }
    j["declarations"] = decls;
  }
  if (r.run) {
    json x;
    x["main"] = r.run->main;
    x["term"] = r.run->term;
    x["outcome"] = outcome_json(r.run->outcome);
    if (!r.run->trace.empty()) {
      json t = json::array();
      for (const auto& e : r.run->trace)
        t.push_back({{"process", to_string(e.process)}, {"rule", e.rule ? rule_name(*e.rule) : ""}});
      x["trace"] = t;
    }
    j["run"] = x;
  }
  if (r.equiv) {
    json x;
    x["claim"] = claim_text(r.equiv->claim);
    x["certificate"] = certificate_json(r.equiv->verdict);
    if (r.equiv->witness) x["witness"] = witness_json(*r.equiv->witness);
    j["equiv"] = x;
  }
  if (with_timing) j["timing_ms"] = r.elapsed_ms;
  return j.dump(2) + "\n";
}

std::string report_text(const Report& r, bool emit_derivations) {
  std::string out;
  for (const auto& d : r.diagnostics) out += format_diagnostic(d, r.file) + "\n";
  if (r.command == "check") {
    for (const auto& d : r.decls) {
      std::string head = d.kind + " " + d.name;
      if (d.kind == "let" && !d.goal.empty()) head += " : " + d.goal;
      out += fmt::format("{:<17} {}\n", status_name(d.status), head);
      for (const auto& n : d.notes) out += "    note: " + n + "\n";
      if (!d.message.empty()) out += indent(d.message, "    ");
      if (d.derivation)
        out += fmt::format("    derivation: {} nodes, {}\n", derivation_size(*d.derivation),
                           d.validated ? "replayed" : "rejected on replay");
      if (d.verdict) {
        if (d.claim) out += "    claim: " + claim_text(*d.claim) + "\n";
        out += indent(certificate_text(*d.verdict), "    ");
      }
      if (emit_derivations && d.derivation) out += indent(derivation_text(*d.derivation), "    ");
    }
    std::size_t failed = 0;
    for (const auto& d : r.decls) failed += d.status == DeclStatus::Failed;
    out += fmt::format("{}: {} declaration(s), {} failed\n", r.file, r.decls.size(), failed);
  }
  if (r.run) {
    out += "main: " + r.run->term + "\n";
    if (!r.run->trace.empty()) out += trace_to_text(r.run->trace);
    out += describe(r.run->outcome) + "\n";
  }
  if (r.equiv) {
    out += "claim: " + claim_text(r.equiv->claim) + "\n";
    out += certificate_text(r.equiv->verdict);
    if (r.equiv->witness) {
      const Witness& w = *r.equiv->witness;
      out += fmt::format("witness ({}): stack {}", w.sound ? "sound" : "suspected", to_string(w.context));
      for (const auto& [x, t] : w.substitution) out += fmt::format(", {} := {}", x, to_string(t));
      out += fmt::format("; the {} side converges\n", w.left_converges ? "left" : "right");
    }
  }
  return out;
}

}  // namespace svr
