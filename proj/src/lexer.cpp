#include "dpl/lexer.hpp"

#include <cctype>
#include <cstdlib>

#include "dpl/errors.hpp"

namespace dpl {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '%'; }

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '%' || c == '\'';
}

bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

const char* describe(Tok kind) {
  switch (kind) {
    case Tok::Ident:
      return "identifier";
    case Tok::Number:
      return "number";
    case Tok::LParen:
      return "'('";
    case Tok::RParen:
      return "')'";
    case Tok::LAngle:
      return "'<'";
    case Tok::RAngle:
      return "'>'";
    case Tok::Comma:
      return "','";
    case Tok::Dot:
      return "'.'";
    case Tok::Colon:
      return "':'";
    case Tok::Equals:
      return "'='";
    case Tok::Plus:
      return "'+'";
    case Tok::Minus:
      return "'-'";
    case Tok::Star:
      return "'*'";
    case Tok::Caret:
      return "'^'";
    case Tok::LtDot:
      return "'<.'";
    case Tok::GtDot:
      return "'>.'";
    case Tok::End:
      return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    Token tok{Tok::End, "", 0.0, line, col};
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      tok.kind = Tok::Ident;
      tok.text = std::string(text.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    if (digit(c)) {
      std::size_t j = i;
      while (j < text.size() && digit(text[j])) ++j;
      if (j + 1 < text.size() && text[j] == '.' && digit(text[j + 1])) {
        ++j;
        while (j < text.size() && digit(text[j])) ++j;
      }
      if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
        if (k < text.size() && digit(text[k])) {
          while (k < text.size() && digit(text[k])) ++k;
          j = k;
        }
      }
      tok.kind = Tok::Number;
      tok.text = std::string(text.substr(i, j - i));
      // strtod rounds correctly and overflows to infinity, which is how
      // the printer spells infinite constants.
      tok.number = std::strtod(tok.text.c_str(), nullptr);
      advance(j - i);
      out.push_back(std::move(tok));
      continue;
    }
    auto single = [&](Tok k) {
      tok.kind = k;
      tok.text = std::string(1, c);
      advance(1);
      out.push_back(tok);
    };
    char next = i + 1 < text.size() ? text[i + 1] : '\0';
    switch (c) {
      case '(':
        single(Tok::LParen);
        break;
      case ')':
        single(Tok::RParen);
        break;
      case ',':
        single(Tok::Comma);
        break;
      case '.':
        single(Tok::Dot);
        break;
      case ':':
        single(Tok::Colon);
        break;
      case '=':
        single(Tok::Equals);
        break;
      case '+':
        single(Tok::Plus);
        break;
      case '-':
        single(Tok::Minus);
        break;
      case '*':
        single(Tok::Star);
        break;
      case '^':
        single(Tok::Caret);
        break;
      case '<':
      case '>':
        if (next == '.') {
          tok.kind = c == '<' ? Tok::LtDot : Tok::GtDot;
          tok.text = std::string(text.substr(i, 2));
          advance(2);
          out.push_back(tok);
        } else {
          single(c == '<' ? Tok::LAngle : Tok::RAngle);
        }
        break;
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
    }
  }
  out.push_back(Token{Tok::End, "", 0.0, line, col});
  return out;
}

}  // namespace dpl
