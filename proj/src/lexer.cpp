#include <fmt/format.h>

#include <array>

#include "svr/surface.hpp"

namespace svr {

namespace {

struct Symbol {
  std::string_view text;
  Tok kind;
};

// Longest first where prefixes overlap.
constexpr std::array kSymbols{
    Symbol{"\\scissors", Tok::Scissors}, Symbol{"%%", Tok::Scissors}, Symbol{"✂", Tok::Scissors},
    Symbol{"==", Tok::Equiv},            Symbol{"≡", Tok::Equiv},     Symbol{"!=", Tok::Inequiv},
    Symbol{"≢", Tok::Inequiv},           Symbol{"∈", Tok::Member},    Symbol{"|>", Tok::Restrict},
    Symbol{"↾", Tok::Restrict},          Symbol{"=>", Tok::Implies},  Symbol{"⇒", Tok::Implies},
    Symbol{"->", Tok::To},               Symbol{"→", Tok::To},        Symbol{"∀", Tok::Forall},
    Symbol{"∃", Tok::Exists},            Symbol{"Π", Tok::Pi},        Symbol{"λ", Tok::Lambda},
    Symbol{"\\", Tok::Lambda},           Symbol{"μ", Tok::Mu},        Symbol{"⊤", Tok::Top},
    Symbol{"⊥", Tok::Bot},               Symbol{":=", Tok::Assign},   Symbol{"∗", Tok::Star},
    Symbol{"*", Tok::Star},              Symbol{"(", Tok::LParen},    Symbol{")", Tok::RParen},
    Symbol{"[", Tok::LBrack},            Symbol{"]", Tok::RBrack},    Symbol{"{", Tok::LBrace},
    Symbol{"}", Tok::RBrace},            Symbol{";", Tok::Semi},      Symbol{",", Tok::Comma},
    Symbol{":", Tok::Colon},             Symbol{"=", Tok::Eq},        Symbol{"|", Tok::Bar},
    Symbol{".", Tok::Dot},               Symbol{"/", Tok::Slash},
};

// Decodes one UTF-8 code point; returns its length, 0 on malformed input.
std::size_t decode(std::string_view s, std::size_t i, char32_t& cp) {
  auto b = static_cast<unsigned char>(s[i]);
  std::size_t n = b < 0x80 ? 1 : (b >> 5) == 0x6 ? 2 : (b >> 4) == 0xE ? 3 : (b >> 3) == 0x1E ? 4 : 0;
  if (n == 0 || i + n > s.size()) return 0;
  cp = n == 1 ? b : n == 2 ? (b & 0x1F) : n == 3 ? (b & 0x0F) : (b & 0x07);
  for (std::size_t k = 1; k < n; ++k) {
    auto c = static_cast<unsigned char>(s[i + k]);
    if ((c >> 6) != 0x2) return 0;
    cp = (cp << 6) | (c & 0x3F);
  }
  return n;
}

bool greek_letter(char32_t cp) {
  return cp >= 0x391 && cp <= 0x3C9 && cp != U'λ' && cp != U'μ' && cp != U'Π' && cp != U'δ';
}

bool ident_start(char32_t cp) {
  return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || cp == '_' || greek_letter(cp);
}

bool ident_char(char32_t cp) { return ident_start(cp) || (cp >= '0' && cp <= '9') || cp == '\''; }

bool subscript_digit(char32_t cp) { return cp >= 0x2080 && cp <= 0x2089; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : s_(src) {}

  LexResult run() {
    LexResult out;
    bool spaced = true;
    while (true) {
      spaced = skip(out) || spaced;
      if (i_ >= s_.size()) break;
      Token t = next(out);
      t.spaced = spaced;
      spaced = false;
      out.tokens.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.span = here();
    end.span.end = end.span.begin;
    out.tokens.push_back(end);
    return out;
  }

 private:
  Span here() const {
    Span sp;
    sp.line = line_;
    sp.column = col_;
    sp.begin = i_;
    sp.end = i_;
    return sp;
  }

  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n && i_ < s_.size(); ++k) {
      char c = s_[i_++];
      if (c == '\n') {
        ++line_;
        col_ = 1;
      } else if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
        ++col_;
      }
    }
  }

  // Skips whitespace and comments; true when anything was skipped.
  bool skip(LexResult& out) {
    std::size_t start = i_;
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance(1);
      } else if (c == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') advance(1);
      } else if (s_.substr(i_, 2) == "(*") {
        Span open = here();
        int depth = 0;
        do {
          if (s_.substr(i_, 2) == "(*") {
            ++depth;
            advance(2);
          } else if (s_.substr(i_, 2) == "*)") {
            --depth;
            advance(2);
          } else {
            advance(1);
          }
        } while (depth > 0 && i_ < s_.size());
        if (depth > 0) {
          open.end = i_;
          out.diagnostics.push_back({Severity::Error, open, "unterminated comment", std::nullopt});
        }
      } else {
        break;
      }
    }
    return i_ != start;
  }

  Token next(LexResult& out) {
    Token t;
    t.span = here();
    char32_t cp = 0;
    std::size_t n = decode(s_, i_, cp);
    if (n == 0) {
      advance(1);
      t.kind = Tok::Error;
      t.span.end = i_;
      out.diagnostics.push_back({Severity::Error, t.span, "malformed UTF-8", std::nullopt});
      return t;
    }
    if (ident_start(cp)) {
      std::size_t start = i_;
      while (i_ < s_.size() && (n = decode(s_, i_, cp)) && ident_char(cp)) advance(n);
      t.kind = Tok::Ident;
      t.text = std::string(s_.substr(start, i_ - start));
    } else if (cp >= '0' && cp <= '9') {
      std::size_t start = i_;
      while (i_ < s_.size() && s_[i_] >= '0' && s_[i_] <= '9') advance(1);
      t.kind = Tok::Number;
      t.text = std::string(s_.substr(start, i_ - start));
    } else if (subscript_digit(cp)) {
      t.kind = Tok::Subscript;
      while (i_ < s_.size() && (n = decode(s_, i_, cp)) && subscript_digit(cp)) {
        t.text += static_cast<char>('0' + (cp - 0x2080));
        advance(n);
      }
    } else if (cp == U'δ') {
      advance(n);
      t.kind = Tok::Error;
      out.diagnostics.push_back({Severity::Error, with_end(t.span), "δ is an internal instruction", std::nullopt});
    } else {
      bool hit = false;
      for (const auto& sym : kSymbols) {
        if (s_.substr(i_, sym.text.size()) == sym.text) {
          t.kind = sym.kind;
          t.text = std::string(sym.text);
          advance(sym.text.size());
          hit = true;
          break;
        }
      }
      if (!hit) {
        t.text = std::string(s_.substr(i_, n));
        advance(n);
        t.kind = Tok::Error;
        out.diagnostics.push_back(
            {Severity::Error, with_end(t.span), fmt::format("unexpected character '{}'", t.text), std::nullopt});
      }
    }
    t.span.end = i_;
    return t;
  }

  Span with_end(Span sp) const {
    sp.end = i_;
    return sp;
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace

LexResult lex(std::string_view source) { return Lexer(source).run(); }

std::string token_name(Tok k) {
  switch (k) {
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::Subscript: return "subscript";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrack: return "'['";
    case Tok::RBrack: return "']'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Eq: return "'='";
    case Tok::Bar: return "'|'";
    case Tok::Dot: return "'.'";
    case Tok::Slash: return "'/'";
    case Tok::Star: return "'∗'";
    case Tok::Scissors: return "'✂'";
    case Tok::Equiv: return "'≡'";
    case Tok::Inequiv: return "'≢'";
    case Tok::Member: return "'∈'";
    case Tok::Restrict: return "'↾'";
    case Tok::Implies: return "'⇒'";
    case Tok::To: return "'→'";
    case Tok::Forall: return "'∀'";
    case Tok::Exists: return "'∃'";
    case Tok::Pi: return "'Π'";
    case Tok::Lambda: return "'λ'";
    case Tok::Mu: return "'μ'";
    case Tok::Top: return "'⊤'";
    case Tok::Bot: return "'⊥'";
    case Tok::Assign: return "':='";
    case Tok::End: return "end of input";
    case Tok::Error: return "invalid token";
  }
  return "?";
}

std::string severity_name(Severity s) {
  switch (s) {
    case Severity::Error: return "error";
    case Severity::Warning: return "warning";
    case Severity::Note: return "note";
  }
  return "error";
}

std::string format_diagnostic(const Diagnostic& d, std::string_view file) {
  return fmt::format("{}:{}:{}: {}: {}", file, d.span.line, d.span.column, severity_name(d.severity), d.message);
}

}  // namespace svr
