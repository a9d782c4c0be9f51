// Runs the acceptance criteria and prints one line per criterion.
// Usage: acceptance [corpus-dir] [criterion-id ...]

#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <set>
#include <string>

#include "support/criteria.hpp"

int main(int argc, char** argv) {
  std::string corpus = argc > 1 ? argv[1] : SVR_CORPUS_DIR;
  std::set<int> only;
  for (int i = 2; i < argc; ++i) only.insert(std::stoi(argv[i]));
  int ran = 0, failed = 0;
  for (const auto& c : svrtest::criteria(corpus)) {
    if (!only.empty() && !only.count(c.id)) continue;
    auto start = std::chrono::steady_clock::now();
    svrtest::Outcome o = c.run();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("[{}] {}. {}: {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail, secs);
    std::fflush(stdout);
    ++ran;
    failed += !o.pass;
  }
  fmt::print("{}/{} criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
