#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dpl {

enum class Tok {
  Ident,
  Number,
  LParen,
  RParen,
  LAngle,
  RAngle,
  Comma,
  Dot,
  Colon,
  Equals,
  Plus,
  Minus,
  Star,
  Caret,
  LtDot,  // <.
  GtDot,  // >.
  End,
};

struct Token {
  Tok kind;
  std::string text;
  double number = 0.0;
  int line = 1;
  int column = 1;
};

/// Splits source text into tokens. `#` starts a comment running to the end
/// of the line. Identifiers may contain `%` and `'` so that printed traces
/// (which use names like %3) read back in. Throws SyntaxError.
std::vector<Token> lex(std::string_view text);

const char* describe(Tok kind);

}  // namespace dpl
