#include <gtest/gtest.h>

#include <json.hpp>

#include "svr/driver.hpp"

using namespace svr;

namespace {

const char* kSource = R"(
type nat = Z[] | S[nat]
let rec add n m = match n with
  | Z[] → m
  | S[k] → S[add k m]
let two = add S[Z[]] S[Z[]]
let bad : nat = {}
)";

}  // namespace

TEST(Driver, CheckReportsPerDeclaration) {
  Report r = check_source("m.svr", kSource, {});
  ASSERT_EQ(r.decls.size(), 4u);
  EXPECT_EQ(r.decls[1].status, DeclStatus::AssumesTotality);
  EXPECT_EQ(r.decls[3].status, DeclStatus::Failed);
  EXPECT_EQ(r.exit_code, 1);
}

TEST(Driver, RunConverges) {
  Report r = run_source("m.svr", kSource, "two", 10000, true);
  ASSERT_TRUE(r.run.has_value());
  ASSERT_TRUE(std::holds_alternative<Converged>(r.run->outcome));
  EXPECT_TRUE(alpha_eq(std::get<Converged>(r.run->outcome).value, mk::ctor("S", mk::ctor("S", mk::ctor("Z")))));
  EXPECT_FALSE(r.run->trace.empty());
  EXPECT_EQ(r.exit_code, 0);
}

TEST(Driver, EquivVerdicts) {
  Report p = equiv_source("m.svr", kSource, "add Z[] two", "two", {});
  ASSERT_TRUE(p.equiv.has_value());
  EXPECT_EQ(p.equiv->verdict.kind, VerdictKind::Proved);
  Report q = equiv_source("m.svr", kSource, "Z[]", "two", {});
  EXPECT_EQ(q.equiv->verdict.kind, VerdictKind::Refuted);
  ASSERT_TRUE(q.equiv->witness.has_value());
  EXPECT_TRUE(q.equiv->witness->sound);
}

TEST(Driver, JsonSchema) {
  Report r = check_source("m.svr", kSource, {});
  auto j = nlohmann::json::parse(report_json(r, true, false));
  EXPECT_EQ(j["schema"], 1);
  EXPECT_EQ(j["command"], "check");
  EXPECT_EQ(j["exit_code"], 1);
  ASSERT_EQ(j["declarations"].size(), 4u);
  EXPECT_EQ(j["declarations"][1]["status"], "assumes-totality");
  EXPECT_EQ(j["declarations"][3]["status"], "failed");
  EXPECT_FALSE(j.contains("timing_ms"));
}

TEST(Driver, ParseErrorsFail) {
  Report r = check_source("m.svr", "let = ", {});
  EXPECT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.exit_code, 1);
}
