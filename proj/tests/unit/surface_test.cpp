#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "svr/surface.hpp"

using namespace svr;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kNat = R"(
type nat = Z[] | S[nat]
let rec add n m = match n with
  | Z[] → m
  | S[k] → S[add k m]
let two = S[S[Z[]]]
)";

}  // namespace

TEST(Lexer, UnicodeAndAsciiSpellings) {
  auto a = lex("λ x → x ≡ ✂ ⇒");
  auto b = lex("fun x -> x == %% =>");
  ASSERT_TRUE(a.diagnostics.empty());
  ASSERT_TRUE(b.diagnostics.empty());
  std::vector<Tok> want{Tok::Lambda, Tok::Ident, Tok::To, Tok::Ident, Tok::Equiv, Tok::Scissors, Tok::Implies, Tok::End};
  ASSERT_EQ(a.tokens.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(a.tokens[i].kind, want[i]) << i;
  EXPECT_EQ(b.tokens[2].kind, Tok::To);
  EXPECT_EQ(b.tokens[4].kind, Tok::Equiv);
  EXPECT_EQ(b.tokens[5].kind, Tok::Scissors);
}

TEST(Lexer, CommentsAndPositions) {
  auto r = lex("# line\n(* block *) x");
  ASSERT_TRUE(r.diagnostics.empty());
  ASSERT_EQ(r.tokens[0].kind, Tok::Ident);
  EXPECT_EQ(r.tokens[0].span.line, 2u);
  EXPECT_EQ(r.tokens[0].span.column, 13u);
}

TEST(Lexer, ReportsBadCharacter) { EXPECT_FALSE(lex("x ¤ y").diagnostics.empty()); }

TEST(Parser, ModuleDeclarations) {
  ParseResult p = parse(kNat);
  ASSERT_TRUE(p.ok());
  ASSERT_EQ(p.module.decls.size(), 3u);
  EXPECT_TRUE(std::holds_alternative<TypeDef>(p.module.decls[0]));
  const auto& add = std::get<LetDef>(p.module.decls[1]);
  EXPECT_TRUE(add.rec);
  EXPECT_EQ(add.params.size(), 2u);
}

TEST(Parser, RoundTripThroughPrinter) {
  for (const char* path : {SVR_CORPUS_DIR "/intro.svr", SVR_CORPUS_DIR "/safety/control.svr",
                           SVR_CORPUS_DIR "/safety/poly.svr", SVR_CORPUS_DIR "/proofs/lemmas.svr"}) {
    ParseResult p = parse(slurp(path));
    ASSERT_TRUE(p.ok()) << path;
    std::string once = to_source(p.module);
    ParseResult q = parse(once);
    ASSERT_TRUE(q.ok()) << path << "\n" << once;
    EXPECT_EQ(to_source(q.module), once) << path;
  }
}

TEST(Parser, DiagnosticsCarryPositions) {
  ParseResult p = parse("let x = \nlet y = Z[]");
  ASSERT_FALSE(p.ok());
  const Diagnostic& d = p.diagnostics.front();
  EXPECT_EQ(d.severity, Severity::Error);
  EXPECT_GE(d.span.line, 1u);
  std::string text = format_diagnostic(d, "f.svr");
  EXPECT_EQ(text.rfind("f.svr:", 0), 0u);
  EXPECT_NE(text.find("error"), std::string::npos);
}

TEST(Parser, Expressions) {
  auto [e, diags] = parse_expression("(fun x -> x) S[Z[]]");
  ASSERT_TRUE(diags.empty());
  EXPECT_TRUE(std::holds_alternative<EApp>(e->node));
}

TEST(Desugar, GlobalsAndTypes) {
  ElaboratedModule m = desugar(parse(kNat).module);
  ASSERT_TRUE(m.ok());
  EXPECT_NE(m.types.lookup("nat"), nullptr);
  EXPECT_EQ(m.globals.at("two"), GlobalKind::Value);
  EXPECT_EQ(m.items.size(), 3u);
}

TEST(Desugar, NonValueArgumentsAreWrapped) {
  // A constructor around a non-value becomes a λ-redex.
  ElaboratedModule m = desugar(parse("let f x = S[(fun y -> y) x]").module);
  ASSERT_TRUE(m.ok());
  const auto& def = std::get<CoreDef>(m.items[0]);
  const auto* lam = as<Lambda>(value_of(def.body));
  ASSERT_NE(lam, nullptr);
  EXPECT_NE(as<App>(lam->body), nullptr);
}

TEST(Desugar, UnboundNameIsReported) {
  ElaboratedModule m = desugar(parse("let f = g").module);
  EXPECT_FALSE(m.ok());
}

TEST(Desugar, FixpointUnfolds) {
  // f = λn case n [Z → Z[] | S[k] → f k]
  Term body = mk::val(mk::lam(
      "n", mk::case_of(mk::var("n"), {{"Z", Branch{"u", mk::val(mk::ctor("Z"))}},
                                      {"S", Branch{"k", mk::app(mk::val(mk::var("f")), mk::val(mk::var("k")))}}})));
  Value fix = fixpoint("f", value_of(body));
  Term call = mk::app(mk::val(fix), mk::val(mk::ctor("S", mk::ctor("S", mk::ctor("Z")))));
  RunOutcome out = run(Process{call, mk::svar("π")}, 10000);
  ASSERT_TRUE(std::holds_alternative<Converged>(out));
  EXPECT_TRUE(alpha_eq(std::get<Converged>(out).value, mk::ctor("Z")));
}
