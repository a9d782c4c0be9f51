#include <gtest/gtest.h>

#include "svr/syntax.hpp"

using namespace svr;

namespace {

Term id_term() { return mk::val(mk::lam("x", mk::val(mk::var("x")))); }

}  // namespace

TEST(Syntax, SubstitutionReplacesFreeOccurrences) {
  Term t = mk::app(mk::val(mk::var("x")), mk::val(mk::var("y")));
  Term r = subst(t, LambdaSubst{"x", mk::unit()});
  EXPECT_TRUE(alpha_eq(r, mk::app(mk::val(mk::unit()), mk::val(mk::var("y")))));
}

TEST(Syntax, SubstitutionStopsAtBinder) {
  Term t = id_term();
  EXPECT_TRUE(alpha_eq(subst(t, LambdaSubst{"x", mk::unit()}), t));
}

TEST(Syntax, SubstitutionAvoidsCapture) {
  // (λy x)[x := y] must not bind the substituted y.
  Term t = mk::val(mk::lam("y", mk::val(mk::var("x"))));
  Term r = subst(t, LambdaSubst{"x", mk::var("y")});
  const auto* l = as<Lambda>(value_of(r));
  ASSERT_NE(l, nullptr);
  EXPECT_NE(l->param, "y");
  EXPECT_TRUE(free_vars(r).lambda.contains("y"));
}

TEST(Syntax, StackSubstitutionReplacesRestart) {
  Term t = mk::proc(mk::val(mk::unit()), mk::svar("α"));
  Stack s = mk::push(mk::ctor("A"), mk::svar("β"));
  Term r = subst(t, StackSubst{"α", s});
  EXPECT_TRUE(alpha_eq(r, mk::proc(mk::val(mk::unit()), s)));
}

TEST(Syntax, AlphaEquivalence) {
  Term a = mk::val(mk::lam("x", mk::val(mk::var("x"))));
  Term b = mk::val(mk::lam("z", mk::val(mk::var("z"))));
  Term c = mk::val(mk::lam("z", mk::val(mk::var("x"))));
  EXPECT_TRUE(alpha_eq(a, b));
  EXPECT_FALSE(alpha_eq(a, c));
  EXPECT_TRUE(alpha_eq(mk::mu("α", mk::proc(a, mk::svar("α"))), mk::mu("β", mk::proc(b, mk::svar("β")))));
  EXPECT_EQ(canonical_key(a), canonical_key(b));
}

TEST(Syntax, FreeVariablesBySort) {
  Term t = mk::mu("α", mk::proc(mk::app(mk::tvar("a"), mk::val(mk::var("x"))), mk::svar("β")));
  const VarSets& fv = free_vars(t);
  EXPECT_TRUE(fv.lambda.contains("x"));
  EXPECT_TRUE(fv.term.contains("a"));
  EXPECT_TRUE(fv.mu.contains("β"));
  EXPECT_FALSE(fv.mu.contains("α"));
}

TEST(Syntax, RecordsAreUnordered) {
  Value a = mk::record({{"l", mk::unit()}, {"k", mk::ctor("A")}});
  Value b = mk::record({{"k", mk::ctor("A")}, {"l", mk::unit()}});
  EXPECT_TRUE(alpha_eq(a, b));
}

TEST(Syntax, PrinterShowsStructure) {
  EXPECT_EQ(to_string(mk::unit()), "{}");
  std::string s = to_string(mk::ctor("S", mk::ctor("Z")));
  EXPECT_NE(s.find("S["), std::string::npos);
  EXPECT_NE(s.find("Z"), std::string::npos);
  EXPECT_NE(to_string(mk::proj(mk::record({{"l", mk::unit()}}), "l")).find(".l"), std::string::npos);
}

TEST(Syntax, SizeAndDeltaFreedom) {
  EXPECT_EQ(size(mk::unit()), 1u);
  EXPECT_GT(size(id_term()), size(mk::val(mk::unit())));
  EXPECT_TRUE(delta_free(id_term()));
  EXPECT_FALSE(delta_free(mk::delta(mk::unit(), mk::ctor("A"))));
}

TEST(Syntax, StackBottom) {
  Stack s = mk::push(mk::unit(), mk::frame(id_term(), mk::svar("π")));
  EXPECT_EQ(stack_bottom(s), "π");
}
