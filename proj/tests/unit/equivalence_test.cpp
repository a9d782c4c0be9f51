#include <gtest/gtest.h>

#include "svr/equivalence.hpp"

using namespace svr;

namespace {

Term v(Value x) { return mk::val(std::move(x)); }
Term idf() { return v(mk::lam("x", v(mk::var("x")))); }

Verdict eq(const Term& a, const Term& b, const EquationalContext& e = {}) {
  return decide(e, a, b, Polarity::Equiv, Budget{});
}

}  // namespace

TEST(Normalize, ValueBetaProjectionCase) {
  Term t = mk::app(idf(), v(mk::ctor("A")));
  EXPECT_TRUE(alpha_eq(normalize(t, 100), v(mk::ctor("A"))));
  Term p = mk::proj(mk::record({{"l", mk::ctor("B")}}), "l");
  EXPECT_TRUE(alpha_eq(normalize(p, 100), v(mk::ctor("B"))));
  Term c = mk::case_of(mk::ctor("A", mk::unit()), {{"A", Branch{"y", v(mk::ctor("B", mk::var("y")))}}});
  EXPECT_TRUE(alpha_eq(normalize(c, 100), v(mk::ctor("B", mk::unit()))));
}

TEST(Normalize, TracedStepsNameAxioms) {
  Normalized n = normalize_traced(mk::app(idf(), v(mk::unit())), 100);
  ASSERT_EQ(n.steps.size(), 1u);
  EXPECT_FALSE(n.steps[0].axiom.empty());
  EXPECT_FALSE(n.out_of_fuel);
}

TEST(Normalize, FuelBoundsDivergence) { EXPECT_TRUE(normalize_traced(omega(), 50).out_of_fuel); }

TEST(Decide, ProvesAxiomInstances) {
  EXPECT_EQ(eq(mk::app(idf(), v(mk::ctor("A"))), v(mk::ctor("A"))).kind, VerdictKind::Proved);
  EXPECT_EQ(eq(idf(), v(mk::lam("z", v(mk::var("z"))))).kind, VerdictKind::Proved);
}

TEST(Decide, RefutesClashes) {
  Verdict r = eq(v(mk::ctor("A")), v(mk::ctor("B")));
  EXPECT_EQ(r.kind, VerdictKind::Refuted);
  ASSERT_TRUE(r.certificate.clash.has_value());
  EXPECT_EQ(eq(v(mk::record({{"l", mk::unit()}})), v(mk::record({{"k", mk::unit()}}))).kind, VerdictKind::Refuted);
  EXPECT_EQ(eq(idf(), v(mk::ctor("A"))).kind, VerdictKind::Refuted);
}

TEST(Decide, InequationPolarity) {
  EXPECT_EQ(decide({}, v(mk::ctor("A")), v(mk::ctor("B")), Polarity::Inequiv, Budget{}).kind, VerdictKind::Proved);
  EXPECT_EQ(decide({}, v(mk::ctor("A")), v(mk::ctor("A")), Polarity::Inequiv, Budget{}).kind, VerdictKind::Refuted);
}

TEST(Decide, UsesContextEquations) {
  Term a = mk::tvar("a");
  EquationalContext e{Claim{a, v(mk::ctor("A")), Polarity::Equiv}};
  EXPECT_EQ(eq(a, v(mk::ctor("A")), e).kind, VerdictKind::Proved);
  EXPECT_EQ(eq(mk::case_of(mk::var("x"), {{"A", Branch{"y", v(mk::unit())}}}), v(mk::unit()),
               {Claim{v(mk::var("x")), v(mk::ctor("A"))}})
                .kind,
            VerdictKind::Proved);
}

TEST(Decide, ContradictoryContexts) {
  Term a = mk::tvar("a");
  EquationalContext bad{Claim{a, v(mk::ctor("A"))}, Claim{a, v(mk::ctor("B"))}};
  EXPECT_EQ(context_contradictory(bad, Budget{}).kind, VerdictKind::Proved);
  EquationalContext fine{Claim{a, v(mk::ctor("A"))}};
  EXPECT_NE(context_contradictory(fine, Budget{}).kind, VerdictKind::Proved);
  EquationalContext self{Claim{v(mk::ctor("A")), v(mk::ctor("A")), Polarity::Inequiv}};
  EXPECT_EQ(context_contradictory(self, Budget{}).kind, VerdictKind::Proved);
}

TEST(Search, FindsSoundWitnessForClash) {
  auto w = search_inequivalence(v(mk::ctor("A")), v(mk::ctor("B")), Budget{});
  ASSERT_TRUE(w.has_value());
  EXPECT_TRUE(w->sound);
}

TEST(Search, NoWitnessForEqualTerms) {
  EXPECT_FALSE(search_inequivalence(mk::app(idf(), v(mk::ctor("A"))), v(mk::ctor("A")), Budget{}).has_value());
}

TEST(Search, DivergenceIsNotSound) {
  auto w = search_inequivalence(omega(), v(mk::unit()), Budget{1000});
  ASSERT_TRUE(w.has_value());
  EXPECT_FALSE(w->sound);
}
