#include "criteria.hpp"

#include <fmt/format.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gen.hpp"
#include "oracle.hpp"
#include "svr/driver.hpp"

namespace svrtest {

using namespace svr;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<fs::path> svr_files(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".svr") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

void walk(const Derivation& d, const std::function<void(const Derivation&)>& f) {
  f(d);
  for (const auto& p : d.premises) walk(p, f);
}

class FiringOracle : public EquivOracle {
 public:
  OracleAnswer query(const Value&, const Value&) const override { return OracleAnswer::DefinitelyInequivalent; }
};

}  // namespace

Derivation strip_macros(const Derivation& d) {
  if ((d.rule == "Πₑ,≡" || d.rule == "∀ᵢ,≡") && d.premises.size() == 1) return strip_macros(d.premises[0]);
  Derivation out = d;
  for (auto& p : out.premises) p = strip_macros(p);
  return out;
}

Derivation drop_certificates(const Derivation& d) {
  Derivation out = d;
  if (out.rule == "≡" || out.rule == "≢") {
    std::erase_if(out.evidence, [](const Evidence& e) { return e.kind == EvidenceKind::Decide; });
  }
  for (auto& p : out.premises) p = drop_certificates(p);
  return out;
}

// ---------------------------------------------------------------------------

Outcome intro_programs(const std::string& corpus) {
  auto start = Clock::now();
  fs::path file = fs::path(corpus) / "intro.svr";
  Report r = check_source(file.string(), read(file), DriverOptions{});
  double secs = seconds_since(start);
  std::vector<std::string> problems;
  if (r.exit_code != 0) problems.push_back("exit code " + std::to_string(r.exit_code));
  std::vector<std::string> expected{"nat", "add", "addZeroN", "addNZero"};
  std::vector<std::string> names;
  std::size_t derivations = 0;
  for (const auto& d : r.decls) {
    names.push_back(d.name);
    if (d.derivation) {
      ++derivations;
      if (!d.validated) problems.push_back(d.name + " did not replay");
    }
    bool rec = d.name == "add" || d.name == "addNZero";
    bool marked = d.status == DeclStatus::AssumesTotality;
    if (rec != marked) problems.push_back(d.name + (rec ? " lacks" : " wrongly carries") + " assumes-totality");
  }
  if (names != expected) problems.push_back("unexpected declarations");
  if (derivations != 2) problems.push_back(fmt::format("{} derivations instead of 2", derivations));
  if (secs >= 5.0) problems.push_back(fmt::format("took {:.2f} s", secs));
  Outcome o;
  o.pass = problems.empty();
  o.detail = o.pass ? fmt::format("4 declarations, 2 validated derivations, 2 assumes-totality, {:.3f} s", secs)
                    : fmt::format("{}", fmt::join(problems, "; "));
  return o;
}

Outcome machine_conformance() {
  auto start = Clock::now();
  std::vector<std::string> problems;

  // One golden step per rule.
  Value id = mk::lam("x", mk::val(mk::var("x")));
  Value a = mk::ctor("A");
  Stack alpha = mk::svar("α");
  struct Golden {
    std::string rule;
    Process from;
    Process to;
    const EquivOracle* oracle;
  };
  static const FiringOracle firing;
  std::vector<Golden> table{
      {"push", {mk::app(mk::val(id), mk::val(a)), alpha}, {mk::val(a), mk::frame(mk::val(id), alpha)}, &null_oracle()},
      {"pop", {mk::val(a), mk::frame(mk::val(id), alpha)}, {mk::val(id), mk::push(a, alpha)}, &null_oracle()},
      {"beta", {mk::val(id), mk::push(a, alpha)}, {mk::val(a), alpha}, &null_oracle()},
      {"capture",
       {mk::mu("β", mk::proc(mk::val(a), mk::svar("β"))), mk::push(id, alpha)},
       {mk::proc(mk::val(a), mk::push(id, alpha)), mk::push(id, alpha)},
       &null_oracle()},
      {"restart", {mk::proc(mk::val(a), mk::svar("β")), alpha}, {mk::val(a), mk::svar("β")}, &null_oracle()},
      {"project", {mk::proj(mk::record({{"l", a}, {"k", id}}), "l"), alpha}, {mk::val(a), alpha}, &null_oracle()},
      {"case",
       {mk::case_of(mk::ctor("B", a), {{"A", Branch{"y", mk::val(id)}}, {"B", Branch{"y", mk::val(mk::var("y"))}}}), alpha},
       {mk::val(a), alpha},
       &null_oracle()},
      {"delta", {mk::delta(a, mk::ctor("B")), alpha}, {mk::val(a), alpha}, &firing},
      {"unit", {mk::unit_probe(mk::unit()), alpha}, {mk::val(mk::unit()), alpha}, &null_oracle()},
  };
  for (const auto& g : table) {
    StepResult r = step(g.from, *g.oracle);
    auto* n = std::get_if<Next>(&r);
    if (!n || rule_name(n->rule) != g.rule || !alpha_eq(n->process, g.to)) problems.push_back("golden " + g.rule);
  }

  // Every process up to size 6.
  Enumerator en;
  std::size_t total = 0, blocked = 0, unclassified = 0, closed_open = 0;
  for (const auto& p : en.processes(6)) {
    ++total;
    Expected want = expected_step(p);
    Expected got = observed_step(step(p));
    if (got.shape != Shape::Reduces) ++blocked;
    if (want.shape != got.shape || want.rule != got.rule) {
      if (++unclassified <= 3)
        problems.push_back(fmt::format("{}: expected {} {}, got {} {}", to_string(p), shape_name(want.shape), want.rule,
                                       shape_name(got.shape), got.rule));
    }
    if (free_vars(p).closed() && (got.shape == Shape::OpenLambda || got.shape == Shape::OpenTerm)) ++closed_open;
  }
  if (unclassified) problems.push_back(fmt::format("{} disagreements", unclassified));
  if (closed_open) problems.push_back(fmt::format("{} closed processes blocked on a variable", closed_open));
  double secs = seconds_since(start);
  if (secs >= 60.0) problems.push_back(fmt::format("took {:.1f} s", secs));
  Outcome o;
  o.pass = problems.empty();
  o.detail = o.pass ? fmt::format("9/9 golden steps; {} processes of size ≤ 6, {} blocked, 0 unclassified, {:.1f} s",
                                  total, blocked, secs)
                    : fmt::format("{}", fmt::join(problems, "; "));
  return o;
}

Outcome substitution_commutes(std::size_t processes, std::size_t per_process) {
  Random rnd(20261016);
  std::size_t cases = 0, agree = 0;
  std::string first;
  for (std::size_t i = 0; i < processes; ++i) {
    Process p = rnd.reducible_process(3);
    Process q = std::get<Next>(step(p)).process;
    for (std::size_t j = 0; j < per_process; ++j) {
      std::vector<Binding> sigma{LambdaSubst{"x", rnd.closed_value(2)}, StackSubst{"α", rnd.stack(2, {}, "β")}};
      Process ps = p, qs = q;
      for (const auto& b : sigma) {
        ps = subst(ps, b);
        qs = subst(qs, b);
      }
      ++cases;
      StepResult r = step(ps);
      auto* n = std::get_if<Next>(&r);
      if (n && alpha_eq(n->process, qs)) {
        ++agree;
      } else if (first.empty()) {
        first = to_string(p);
      }
    }
  }
  Outcome o;
  o.pass = cases > 0 && agree == cases;
  o.detail = fmt::format("{}/{} substituted steps agree up to alpha", agree, cases);
  if (!o.pass) o.detail += "; first failure from " + first;
  return o;
}

Outcome axiom_suite() {
  Random rnd(4);
  Budget budget;
  std::vector<std::pair<Term, Term>> equal, distinct;

  auto terminates = [](const Term& t) { return !normalize_traced(t, 2000).out_of_fuel; };
  while (equal.size() < 200) {
    Term body = rnd.term(2, {"x"});
    Value v = rnd.closed_value(2);
    Term rhs = subst_closed(body, "x", v);
    Term lhs = mk::app(mk::val(mk::lam("x", body)), mk::val(v));
    if (terminates(lhs)) equal.emplace_back(lhs, rhs);
  }
  while (equal.size() < 350) {
    Value v = rnd.closed_value(2), w = rnd.closed_value(2);
    const std::string& l = rnd.label();
    std::map<std::string, Value> fields{{l, v}};
    fields.emplace(l == "l" ? "k" : "l", w);
    equal.emplace_back(mk::proj(mk::record(fields), l), mk::val(v));
  }
  while (equal.size() < 500) {
    Value v = rnd.closed_value(2);
    Term ta = rnd.term(2, {"y"}), tb = rnd.term(2, {"y"});
    const std::string& c = rnd.ctor();
    Term lhs = mk::case_of(mk::ctor(c, v), {{"A", Branch{"y", ta}}, {"B", Branch{"y", tb}}});
    Term rhs = subst_closed(c == "A" ? ta : tb, "y", v);
    if (terminates(lhs)) equal.emplace_back(lhs, rhs);
  }
  while (distinct.size() < 80) {
    Value v = rnd.closed_value(2), w = rnd.closed_value(2);
    distinct.emplace_back(mk::val(mk::ctor("A", v)), mk::val(mk::ctor("B", w)));
  }
  while (distinct.size() < 150) {
    Value v = rnd.closed_value(2), w = rnd.closed_value(2);
    if (rnd.chance(50))
      distinct.emplace_back(mk::val(mk::record({{"l", v}})), mk::val(mk::record({{"k", w}})));
    else
      distinct.emplace_back(mk::val(mk::record({{"l", v}})), mk::val(mk::record({{"l", v}, {"k", w}})));
  }
  while (distinct.size() < 220) {
    Value lam = mk::lam("x", rnd.term(2, {"x"}));
    Value data = rnd.chance(50) ? mk::ctor(rnd.ctor(), rnd.closed_value(1)) : mk::record({{rnd.label(), rnd.closed_value(1)}});
    distinct.emplace_back(mk::val(lam), mk::val(data));
  }

  std::size_t proved = 0, refuted = 0, confirmed3 = 0, confirmed4 = 0;
  std::string first;
  for (const auto& [l, r] : equal) {
    if (decide({}, l, r, Polarity::Equiv, budget).kind == VerdictKind::Proved) ++proved;
    else if (first.empty()) first = to_string(l) + " ≡ " + to_string(r);
  }
  Budget b3;
  b3.fuel = 10000;
  b3.depth = 3;
  Budget b4 = b3;
  b4.depth = 4;
  for (const auto& [l, r] : distinct) {
    if (decide({}, l, r, Polarity::Equiv, budget).kind != VerdictKind::Refuted) {
      if (first.empty()) first = to_string(l) + " ≢ " + to_string(r);
      continue;
    }
    ++refuted;
    auto w = search_inequivalence(l, r, b3);
    if (w && w->sound) {
      ++confirmed3;
      continue;
    }
    auto w4 = search_inequivalence(l, r, b4);
    if (w4 && w4->sound) ++confirmed4;
  }
  double rate3 = refuted ? static_cast<double>(confirmed3) / static_cast<double>(refuted) : 0.0;
  Outcome o;
  o.pass = proved == equal.size() && refuted == distinct.size() && rate3 >= 0.95 &&
           confirmed3 + confirmed4 == refuted;
  o.detail = fmt::format("proved {}/{}; refuted {}/{}; search confirmed {} at depth 3 ({:.1f}%), {} more at depth 4",
                         proved, equal.size(), refuted, distinct.size(), confirmed3, 100.0 * rate3, confirmed4);
  if (!first.empty()) o.detail += "; first miss: " + first;
  return o;
}

Outcome oracle_agreement(std::size_t pairs) {
  Random rnd(5);
  Budget budget;
  budget.fuel = 10000;
  std::size_t proved = 0, refuted = 0, unknown = 0, bad_proved = 0, bad_refuted = 0;
  std::string first;
  for (std::size_t i = 0; i < pairs; ++i) {
    auto [l, r] = rnd.term_pair(3);
    Verdict v = decide({}, l, r, Polarity::Equiv, budget);
    if (v.kind == VerdictKind::Proved) {
      ++proved;
      auto w = search_inequivalence(l, r, budget);
      if (w && w->sound) {
        ++bad_proved;
        if (first.empty()) first = to_string(l) + " vs " + to_string(r);
      }
    } else if (v.kind == VerdictKind::Refuted) {
      ++refuted;
      if (!exhaustive_probe(l, r, 2, 10000).distinguished) {
        ++bad_refuted;
        if (first.empty()) first = to_string(l) + " vs " + to_string(r);
      }
    } else {
      ++unknown;
    }
  }
  Outcome o;
  o.pass = bad_proved == 0 && bad_refuted == 0;
  o.detail = fmt::format("{} pairs: {} proved, {} refuted, {} unknown; {} proved-but-separated, {} refuted-but-inseparable",
                         pairs, proved, refuted, unknown, bad_proved, bad_refuted);
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

Outcome pi_elim_admissible(std::size_t instances) {
  TypeTable types;
  Formula nat = fm::named("nat");
  types.define("nat", fm::variant({{"Z", fm::record({})}, {"S", nat}}));
  CheckOptions opts;
  opts.types = &types;
  Random rnd(6);

  auto literal = [&](int n) {
    Value v = mk::ctor("Z");
    for (int i = 0; i < n; ++i) v = mk::ctor("S", v);
    return v;
  };
  // A non-value whose normal form is a numeral.
  std::function<Term(int)> wrap = [&](int depth) -> Term {
    Term inner = depth > 0 && rnd.chance(50) ? wrap(depth - 1) : mk::val(literal(rnd.below(3)));
    switch (rnd.below(4)) {
      case 0: return mk::app(mk::val(mk::lam("y", mk::val(mk::var("y")))), inner);
      case 1: return mk::app(mk::val(mk::lam("y", mk::val(mk::ctor("S", mk::var("y"))))), inner);
      case 2:
        if (is_value(inner)) return mk::proj(mk::record({{"l", value_of(inner)}, {"k", mk::unit()}}), "l");
        return mk::app(mk::val(mk::lam("y", mk::proj(mk::record({{"l", mk::var("y")}}), "l"))), inner);
      default:
        if (is_value(inner))
          return mk::case_of(mk::ctor("A", value_of(inner)), {{"A", Branch{"y", mk::val(mk::var("y"))}}});
        return mk::app(mk::val(mk::lam("y", mk::val(mk::var("y")))), inner);
    }
  };
  std::vector<std::function<Formula(const Term&)>> bodies{
      [&](const Term&) { return nat; },
      [&](const Term& a) { return sugar_equation(a, a); },
      [&](const Term& a) { return fm::arrow(sugar_equation(a, mk::val(mk::ctor("Z"))), nat); },
  };

  std::size_t built = 0, accepted = 0, primitive = 0, rejected = 0;
  std::string first;
  while (built < instances) {
    Term u = wrap(2);
    auto& body = bodies[built % bodies.size()];
    Formula pi = sugar_pi("a", nat, body(mk::tvar("a")));
    TypingContext g = TypingContext{}.with(LambdaHyp{"f", pi});
    CheckResult res = check_term(g, mk::app(mk::val(mk::var("f")), u), body(u), opts);
    if (!res.ok()) {
      if (first.empty()) first = "could not check f " + to_string(u) + ": " + describe(*res.failure);
      ++built;
      continue;
    }
    ++built;
    auto tags = rule_tags(*res.derivation);
    if (std::find(tags.begin(), tags.end(), "Πₑ,≡") == tags.end()) {
      if (first.empty()) first = "no Πₑ,≡ in the derivation for " + to_string(u);
      continue;
    }
    if (validate(*res.derivation, opts)) ++accepted;
    Derivation plain = strip_macros(*res.derivation);
    auto plain_tags = rule_tags(plain);
    bool macro_free = std::none_of(plain_tags.begin(), plain_tags.end(),
                                   [](const std::string& t) { return t == "Πₑ,≡" || t == "∀ᵢ,≡"; });
    if (macro_free && validate(plain, opts)) ++primitive;
    else if (first.empty()) first = "expansion rejected: " + validate_explain(plain, opts).value_or("macro left");
    if (!validate(drop_certificates(plain), opts)) ++rejected;
  }
  Outcome o;
  o.pass = accepted == instances && primitive == instances && rejected == instances;
  o.detail = fmt::format("{} instances: {} validate, {} validate with primitive rules only, {} rejected without certificate",
                         instances, accepted, primitive, rejected);
  if (!o.pass && !first.empty()) o.detail += "; " + first;
  return o;
}

Outcome safety(const std::string& corpus) {
  std::size_t programs = 0, converged = 0, rechecked = 0, failed_checks = 0;
  std::string first;
  for (const auto& file : svr_files(fs::path(corpus) / "safety")) {
    std::string src = read(file);
    Report r = check_source(file.string(), src, DriverOptions{});
    std::map<std::string, DeclStatus> status;
    for (const auto& d : r.decls)
      if (d.kind == "let") status[d.name] = d.status;
    ElaboratedModule m = load_module(src).module;
    elaborate_proofs(m, DriverOptions{});
    for (const auto& it : m.items) {
      auto* d = std::get_if<CoreDef>(&it);
      if (!d || !d->goal) continue;
      if (status[d->name] == DeclStatus::Failed) {
        ++failed_checks;
        if (first.empty()) first = d->name + " does not check";
        continue;
      }
      const Formula& a = *d->goal;
      if (!is_pure(a, &m.types) || !a->fv.terms.closed()) continue;
      ++programs;
      auto t = closed_program(m, d->name);
      if (!t) continue;
      RunOutcome out = run(Process{*t, mk::svar("α")}, 100000);
      auto* c = std::get_if<Converged>(&out);
      if (!c) {
        if (first.empty()) first = d->name + ": " + describe(out);
        continue;
      }
      ++converged;
      CheckOptions opts;
      opts.types = &m.types;
      if (check_value(TypingContext{}, c->value, a, opts).ok()) ++rechecked;
      else if (first.empty()) first = d->name + ": " + to_string(c->value) + " does not re-check";
    }
  }
  Outcome o;
  o.pass = programs >= 100 && converged == programs && rechecked == programs && failed_checks == 0;
  o.detail = fmt::format("{} typed programs: {} converge, {} re-check", programs, converged, rechecked);
  if (failed_checks) o.detail += fmt::format("; {} corpus definitions fail to check", failed_checks);
  if (!first.empty()) o.detail += "; first problem: " + first;
  return o;
}

Outcome consistency(const std::string& corpus) {
  std::size_t probes = 0, rejected = 0, nonvalue = 0;
  std::string first;
  for (const auto& file : svr_files(fs::path(corpus) / "unsound")) {
    Report r = check_source(file.string(), read(file), DriverOptions{});
    bool found = false, failed = false;
    for (const auto& d : r.decls)
      if (d.name == "bad") {
        found = true;
        failed = d.status == DeclStatus::Failed;
      }
    ++probes;
    if (found && failed) {
      ++rejected;
      if (file.stem().string().rfind("nonvalue", 0) == 0) ++nonvalue;
    } else if (first.empty()) {
      first = file.filename().string() + (found ? " checks" : " has no declaration named bad");
    }
  }

  // ✂ against ⊥ in generated equational contexts.
  Random rnd(8);
  std::size_t contexts = 0, agree = 0, contradictory = 0;
  for (int i = 0; i < 200; ++i) {
    TypingContext g = TypingContext{}.with(LambdaHyp{"x", sugar_top()}).with(LambdaHyp{"y", sugar_top()});
    int n = 1 + rnd.below(3);
    for (int j = 0; j < n; ++j) {
      auto side = [&]() -> Term {
        switch (rnd.below(3)) {
          case 0: return mk::val(mk::var(rnd.chance(50) ? "x" : "y"));
          case 1: return mk::val(rnd.data(2));
          default: return mk::val(mk::ctor(rnd.ctor(), mk::var(rnd.chance(50) ? "x" : "y")));
        }
      };
      Term l = side(), r = side();
      if (rnd.chance(80)) g = g.with(EquivHyp{l, r});
      else g = g.with(InequivHyp{l, r});
    }
    ++contexts;
    Budget b;
    bool contra = context_contradictory(restrict_to_equational(g), b).kind == VerdictKind::Proved;
    contradictory += contra;
    bool accepted = check_value(g, mk::scissors(), sugar_bot(), CheckOptions{}).ok();
    if (accepted == contra) ++agree;
    else if (first.empty()) first = "✂ " + std::string(accepted ? "accepted" : "rejected") + " in " + to_string(g);
  }

  // Every ✂ in a corpus derivation sits in a contradictory context.
  std::size_t scissors_nodes = 0, scissors_ok = 0;
  std::vector<fs::path> files = svr_files(fs::path(corpus) / "safety");
  for (const auto& f : svr_files(fs::path(corpus) / "proofs")) files.push_back(f);
  files.push_back(fs::path(corpus) / "intro.svr");
  for (const auto& file : files) {
    Report r = check_source(file.string(), read(file), DriverOptions{});
    for (const auto& d : r.decls) {
      if (!d.derivation) continue;
      walk(*d.derivation, [&](const Derivation& n) {
        if (n.rule != "✂") return;
        ++scissors_nodes;
        Budget b;
        if (context_contradictory(restrict_to_equational(n.conclusion.context), b).kind == VerdictKind::Proved)
          ++scissors_ok;
      });
    }
  }

  Outcome o;
  o.pass = probes >= 10 && rejected == probes && nonvalue >= 1 && agree == contexts && scissors_ok == scissors_nodes;
  o.detail = fmt::format(
      "{}/{} pseudo-proofs of ⊥ rejected ({} non-value dependent); ✂ agrees with the contradiction check in {}/{} "
      "contexts ({} contradictory); {}/{} corpus ✂ nodes in contradictory contexts",
      rejected, probes, nonvalue, agree, contexts, contradictory, scissors_ok, scissors_nodes);
  if (!first.empty()) o.detail += "; first problem: " + first;
  return o;
}

std::vector<Criterion> criteria(const std::string& corpus) {
  return {
      {1, "intro programs", [corpus] { return intro_programs(corpus); }},
      {2, "machine conformance", [] { return machine_conformance(); }},
      {3, "substitution commutes with reduction", [] { return substitution_commutes(); }},
      {4, "axiom suite", [] { return axiom_suite(); }},
      {5, "oracle agreement", [] { return oracle_agreement(); }},
      {6, "dependent elimination admissible", [] { return pi_elim_admissible(); }},
      {7, "safety", [corpus] { return safety(corpus); }},
      {8, "consistency probes", [corpus] { return consistency(corpus); }},
  };
}

}  // namespace svrtest
