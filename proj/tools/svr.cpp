// svr: check, run and compare programs of the call-by-value λμ-calculus.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "svr/driver.hpp"

namespace {

struct Common {
  std::string file;
  bool json = false;
  std::size_t fuel = 100000;
  int depth = 3;
  int subst_size = 3;
  int delta_index = 2;
};

void add_budget(CLI::App* cmd, Common& c) {
  cmd->add_option("--budget,--fuel", c.fuel, "machine fuel per run");
  cmd->add_option("--depth", c.depth, "stack-context depth of the counterexample search");
  cmd->add_option("--subst-size", c.subst_size, "size bound of substituted values");
  cmd->add_option("--delta-index", c.delta_index, "index of the inequivalence oracle");
}

svr::DriverOptions options(const Common& c) {
  svr::DriverOptions o;
  o.budget.fuel = c.fuel;
  o.budget.depth = c.depth;
  o.budget.subst_size = c.subst_size;
  o.budget.delta_index = c.delta_index;
  return o;
}

int emit(const svr::Report& r, bool json, bool derivations) {
  if (json) {
    std::cout << svr::report_json(r, derivations);
  } else {
    std::string text = svr::report_text(r, derivations);
    (r.exit_code == 2 ? std::cerr : std::cout) << text;
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel for a call-by-value λμ-calculus with a second-order type system"};
  app.require_subcommand(1);

  Common c;
  if (const char* env = std::getenv("SVR_BUDGET")) {
    try {
      c.fuel = std::stoul(env);
    } catch (const std::exception&) {
      std::cerr << "svr: ignoring malformed SVR_BUDGET\n";
    }
  }

  bool derivations = false;
  auto* check = app.add_subcommand("check", "type-check every declaration of a file");
  check->add_option("file", c.file, "source file (.svr)")->required();
  check->add_flag("--json", c.json, "machine-readable report");
  check->add_flag("--emit-derivations", derivations, "include derivation trees");
  add_budget(check, c);

  std::string main_name = "main";
  bool trace = false;
  auto* run = app.add_subcommand("run", "run a closed definition on the abstract machine");
  run->add_option("file", c.file, "source file (.svr)")->required();
  run->add_option("--main", main_name, "definition to run");
  run->add_option("--fuel", c.fuel, "maximum number of machine steps");
  run->add_flag("--trace", trace, "print every machine state");
  run->add_flag("--json", c.json, "machine-readable report");

  std::string lhs, rhs;
  auto* equiv = app.add_subcommand("equiv", "decide an equivalence in the scope of a file");
  equiv->add_option("file", c.file, "source file (.svr)")->required();
  equiv->add_option("--lhs", lhs, "left expression")->required();
  equiv->add_option("--rhs", rhs, "right expression")->required();
  equiv->add_flag("--json", c.json, "machine-readable report");
  add_budget(equiv, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (check->parsed()) return emit(svr::cmd_check(c.file, options(c)), c.json, derivations);
  if (run->parsed()) return emit(svr::cmd_run(c.file, main_name, c.fuel, trace), c.json, false);
  return emit(svr::cmd_equiv(c.file, lhs, rhs, options(c)), c.json, false);
}
