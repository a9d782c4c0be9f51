#pragma once

// The acceptance criteria as functions, shared by the acceptance binary and
// the unit tests.

#include <functional>
#include <string>
#include <vector>

#include "svr/checker.hpp"

namespace svrtest {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> run;
};

// `corpus` is the directory holding intro.svr, safety/, proofs/ and unsound/.
std::vector<Criterion> criteria(const std::string& corpus);

Outcome intro_programs(const std::string& corpus);
Outcome machine_conformance();
Outcome substitution_commutes(std::size_t processes = 1000, std::size_t per_process = 3);
Outcome axiom_suite();
Outcome oracle_agreement(std::size_t pairs = 1000);
Outcome pi_elim_admissible(std::size_t instances = 50);
Outcome safety(const std::string& corpus);
Outcome consistency(const std::string& corpus);

// Replaces every macro node by its expansion.
svr::Derivation strip_macros(const svr::Derivation& d);
// Removes the recorded equivalence certificates from every ≡ and ≢ node.
svr::Derivation drop_certificates(const svr::Derivation& d);

}  // namespace svrtest
