#include <gtest/gtest.h>

#include <algorithm>

#include "support/criteria.hpp"
#include "svr/checker.hpp"

using namespace svr;

namespace {

struct Fixture : ::testing::Test {
  TypeTable types;
  CheckOptions opts;
  Formula nat = fm::named("nat");

  void SetUp() override {
    types.define("nat", fm::variant({{"Z", fm::record({})}, {"S", fm::named("nat")}}));
    opts.types = &types;
  }

  Value lit(int n) {
    Value v = mk::ctor("Z");
    while (n-- > 0) v = mk::ctor("S", v);
    return v;
  }
};

bool has_tag(const Derivation& d, const std::string& tag) {
  auto tags = rule_tags(d);
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

}  // namespace

using Checker = Fixture;

TEST_F(Checker, NumeralsHaveTypeNat) {
  CheckResult r = check_value({}, lit(3), nat, opts);
  ASSERT_TRUE(r.ok()) << describe(*r.failure);
  EXPECT_TRUE(validate(*r.derivation, opts));
}

TEST_F(Checker, RejectsWrongConstructor) {
  CheckResult r = check_value({}, mk::ctor("A"), nat, opts);
  EXPECT_FALSE(r.ok());
}

TEST_F(Checker, IdentityHasArrowType) {
  Value id = mk::lam("x", mk::val(mk::var("x")));
  CheckResult r = check_value({}, id, fm::arrow(nat, nat), opts);
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(validate(*r.derivation, opts));
  EXPECT_FALSE(check_value({}, id, fm::arrow(nat, fm::record({})), opts).ok());
}

TEST_F(Checker, PolymorphicIdentity) {
  Value id = mk::lam("x", mk::val(mk::var("x")));
  Formula a = fm::forall_pred("X", 0, fm::arrow(fm::pred("X"), fm::pred("X")));
  CheckResult r = check_value({}, id, a, opts);
  ASSERT_TRUE(r.ok()) << describe(*r.failure);
  EXPECT_TRUE(validate(*r.derivation, opts));
}

TEST_F(Checker, EquationsByDecision) {
  Term t = mk::app(mk::val(mk::lam("x", mk::val(mk::var("x")))), mk::val(lit(1)));
  Formula goal = sugar_equation(t, mk::val(lit(1)));
  CheckResult r = check_value({}, mk::unit(), goal, opts);
  ASSERT_TRUE(r.ok()) << describe(*r.failure);
  EXPECT_TRUE(validate(*r.derivation, opts));
  Formula wrong = sugar_equation(t, mk::val(lit(2)));
  CheckResult bad = check_value({}, mk::unit(), wrong, opts);
  ASSERT_FALSE(bad.ok());
  EXPECT_EQ(bad.failure->reason, FailureReason::EquivalenceRefuted);
}

TEST_F(Checker, ScissorsOnlyInContradictoryContext) {
  Formula bot = sugar_bot();
  EXPECT_FALSE(check_value({}, mk::scissors(), bot, opts).ok());
  TypingContext g = TypingContext{}.with(EquivHyp{mk::val(mk::ctor("A")), mk::val(mk::ctor("B"))});
  CheckResult r = check_value(g, mk::scissors(), bot, opts);
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(validate(*r.derivation, opts));
}

TEST_F(Checker, NonValueDependentApplicationNeedsEquivalence) {
  // f : Π a:nat (a ≡ a) applied to a non-value that normalizes to a numeral.
  Formula pi = sugar_pi("a", nat, sugar_equation(mk::tvar("a"), mk::tvar("a")));
  TypingContext g = TypingContext{}.with(LambdaHyp{"f", pi});
  Term u = mk::app(mk::val(mk::lam("y", mk::val(mk::var("y")))), mk::val(lit(2)));
  Term t = mk::app(mk::val(mk::var("f")), u);
  CheckResult r = check_term(g, t, sugar_equation(u, u), opts);
  ASSERT_TRUE(r.ok()) << describe(*r.failure);
  EXPECT_TRUE(validate(*r.derivation, opts));
  EXPECT_TRUE(has_tag(*r.derivation, "Πₑ,≡"));
  EXPECT_TRUE(validate(svrtest::strip_macros(*r.derivation), opts));
  EXPECT_FALSE(validate(svrtest::drop_certificates(*r.derivation), opts));
}

TEST_F(Checker, ValidatorRejectsTamperedConclusion) {
  CheckResult r = check_value({}, lit(1), nat, opts);
  ASSERT_TRUE(r.ok());
  Derivation d = *r.derivation;
  d.conclusion.subject = mk::val(mk::ctor("A"));
  EXPECT_TRUE(validate_explain(d, opts).has_value());
}

TEST_F(Checker, ValidatorRejectsUnknownRule) {
  CheckResult r = check_value({}, mk::unit(), fm::record({}), opts);
  ASSERT_TRUE(r.ok());
  Derivation d = *r.derivation;
  d.rule = "no-such-rule";
  EXPECT_FALSE(validate(d, opts));
}

TEST(Formula, PureAndPiView) {
  TypeTable t;
  t.define("nat", fm::variant({{"Z", fm::record({})}, {"S", fm::named("nat")}}));
  EXPECT_TRUE(is_pure(fm::named("nat"), &t));
  EXPECT_FALSE(is_pure(fm::arrow(fm::record({}), fm::record({})), &t));
  auto pi = as_pi(sugar_pi("a", fm::named("nat"), sugar_top()));
  ASSERT_TRUE(pi.has_value());
  EXPECT_EQ(pi->var, "a");
}

TEST(Formula, RejectsUnguardedTypeDefinition) {
  TypeTable t;
  EXPECT_TRUE(t.define("loop", fm::named("loop")).has_value());
}

TEST(Formula, ContextValidity) {
  TypingContext g = TypingContext{}.with(LambdaHyp{"x", fm::record({})});
  EXPECT_TRUE(context_valid(g).ok);
  EXPECT_TRUE(g.lambda_type("x") != nullptr);
}
