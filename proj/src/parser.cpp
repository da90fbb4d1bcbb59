#include "dpl/parser.hpp"

#include <set>
#include <stdexcept>

#include "dpl/elaborate.hpp"
#include "dpl/errors.hpp"
#include "dpl/lexer.hpp"

namespace dpl {

namespace {

const std::set<std::string, std::less<>> kKeywords = {
    "let", "in", "if", "then", "else", "letrec", "rd", "fd", "grad", "fst", "snd", "true", "false", "real", "unit",
};

class Parser {
 public:
  Parser(std::string_view text, const Registry& reg) : toks_(lex(text)), reg_(reg) {
    for (const auto& t : toks_) {
      if (t.kind == Tok::Ident) supply_.avoid(t.text);
    }
  }

  TermPtr program() {
    TermPtr t = term();
    expect(Tok::End);
    return t;
  }

  BoolPtr bool_program() {
    BoolPtr b = bterm();
    expect(Tok::End);
    return b;
  }

  Type type_program() {
    Type t = type();
    expect(Tok::End);
    return t;
  }

 private:
  // ---- token helpers ----

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Span span() const { return {peek().line, peek().column}; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_keyword(std::string_view kw) const { return at(Tok::Ident) && peek().text == kw; }

  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError("expected " + what + ", found " + found, t.line, t.column);
  }

  const Token& expect(Tok k) {
    if (!at(k)) fail(describe(k));
    return next();
  }

  void keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail("'" + std::string(kw) + "'");
    next();
  }

  std::string ident() {
    if (!at(Tok::Ident) || kKeywords.contains(peek().text)) fail("identifier");
    return next().text;
  }

  // ---- types ----

  Type type() {
    Type t = type_atom();
    while (at(Tok::Star)) {
      next();
      t = Type::prod(t, type_atom());
    }
    return t;
  }

  Type type_atom() {
    if (at_keyword("real")) {
      next();
      if (!at(Tok::Caret)) return Type::real();
      next();
      const Token& n = peek();
      if (n.kind != Tok::Number || n.text.find_first_not_of("0123456789") != std::string::npos || n.number < 1) {
        fail("positive integer exponent");
      }
      next();
      return Type::real_power(static_cast<std::size_t>(n.number));
    }
    if (at_keyword("unit")) {
      next();
      return Type::unit();
    }
    if (at(Tok::LParen)) {
      next();
      Type t = type();
      expect(Tok::RParen);
      return t;
    }
    fail("type");
  }

  Binding binder() {
    std::string x = ident();
    expect(Tok::Colon);
    return {x, type()};
  }

  // ---- terms ----

  TermPtr term() {
    if (at_keyword("let")) return let_form();
    if (at_keyword("if")) return if_form();
    if (at_keyword("letrec")) return letrec_form();
    return sum();
  }

  TermPtr let_form() {
    Span sp = span();
    keyword("let");
    if (at(Tok::LAngle)) {
      next();
      std::vector<Binding> bs;
      if (!at(Tok::RAngle)) {
        bs.push_back(binder());
        while (at(Tok::Comma)) {
          next();
          bs.push_back(binder());
        }
      }
      expect(Tok::RAngle);
      expect(Tok::Equals);
      TermPtr m = term();
      keyword("in");
      TermPtr n = term();
      try {
        return elab_tuple_let(bs, m, n, supply_);
      } catch (const std::invalid_argument& e) {
        throw SyntaxError(e.what(), sp.line, sp.column);
      }
    }
    if (at(Tok::Ident) && peek(1).kind == Tok::LParen) return function_def(sp);
    auto [x, t] = binder();
    expect(Tok::Equals);
    TermPtr m = term();
    keyword("in");
    TermPtr n = term();
    return mk::let(x, t, m, n, sp);
  }

  TermPtr letrec_form() {
    Span sp = span();
    keyword("letrec");
    return function_def(sp);
  }

  // f(x: T): U = M in N
  TermPtr function_def(Span sp) {
    std::string f = ident();
    expect(Tok::LParen);
    auto [x, t] = binder();
    expect(Tok::RParen);
    expect(Tok::Colon);
    Type u = type();
    expect(Tok::Equals);
    functions_.push_back(f);
    TermPtr body = term();
    keyword("in");
    TermPtr scope = term();
    functions_.pop_back();
    return mk::letrec(f, x, t, u, body, scope, sp);
  }

  TermPtr if_form() {
    Span sp = span();
    keyword("if");
    BoolPtr b = bterm();
    keyword("then");
    TermPtr m = term();
    keyword("else");
    TermPtr n = term();
    return mk::cond(b, m, n, sp);
  }

  TermPtr sum() {
    TermPtr t = product();
    for (;;) {
      Span sp = span();
      if (at(Tok::Plus)) {
        next();
        t = mk::add(t, product(), sp);
      } else if (at(Tok::Minus)) {
        next();
        TermPtr r = product();
        t = mk::add(t, mk::prim("neg", r, r->span), sp);
      } else {
        return t;
      }
    }
  }

  TermPtr product() {
    TermPtr t = unary();
    while (at(Tok::Star)) {
      Span sp = span();
      next();
      t = mk::mul(t, unary(), sp);
    }
    return t;
  }

  TermPtr unary() {
    if (!at(Tok::Minus)) return atom();
    Span sp = span();
    next();
    if (at(Tok::Number)) return mk::constant(-next().number, sp);
    return mk::prim("neg", unary(), sp);
  }

  TermPtr atom() {
    Span sp = span();
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Number:
        return mk::constant(next().number, sp);
      case Tok::LParen: {
        next();
        if (at(Tok::RParen)) {
          next();
          return mk::unit(sp);
        }
        TermPtr inner = term();
        expect(Tok::RParen);
        return inner;
      }
      case Tok::LAngle: {
        next();
        TermPtr acc = term();
        expect(Tok::Comma);
        acc = mk::pair(acc, term(), std::nullopt, sp);
        while (at(Tok::Comma)) {
          next();
          acc = mk::pair(acc, term(), std::nullopt, sp);
        }
        expect(Tok::RAngle);
        return acc;
      }
      case Tok::Ident:
        break;
      default:
        fail("term");
    }
    const std::string& w = t.text;
    if (w == "let") return let_form();
    if (w == "if") return if_form();
    if (w == "letrec") return letrec_form();
    if (w == "fst" || w == "snd") {
      next();
      TermPtr arg = unary();
      return w == "fst" ? mk::fst(arg, std::nullopt, sp) : mk::snd(arg, std::nullopt, sp);
    }
    if (w == "rd") return rd_form(sp);
    if (w == "fd") return fd_form(sp);
    if (w == "grad") return grad_form(sp);
    std::string name = ident();
    if (!at(Tok::LParen)) return mk::var(name, sp);
    next();
    TermPtr arg = term();
    expect(Tok::RParen);
    if (!is_function(name) && reg_.op(name)) return mk::prim(name, arg, sp);
    return mk::app(name, arg, sp);
  }

  // "(" binder "." term ")"
  std::pair<Binding, TermPtr> abstraction() {
    expect(Tok::LParen);
    Binding b = binder();
    expect(Tok::Dot);
    TermPtr body = term();
    expect(Tok::RParen);
    return {b, body};
  }

  TermPtr parenthesized() {
    expect(Tok::LParen);
    TermPtr t = term();
    expect(Tok::RParen);
    return t;
  }

  TermPtr rd_form(Span sp) {
    keyword("rd");
    auto [b, body] = abstraction();
    TermPtr at_point = parenthesized();
    TermPtr cot = parenthesized();
    return mk::rd(b.first, b.second, body, at_point, cot, sp);
  }

  TermPtr grad_form(Span sp) {
    keyword("grad");
    Span bsp = span();
    auto [b, body] = abstraction();
    std::size_t n = real_power_exponent(b.second);
    if (n == 0) throw SyntaxError("grad needs a binder of type real^n", bsp.line, bsp.column);
    TermPtr at_point = parenthesized();
    TermPtr out = elab_grad(b.first, n, body, at_point);
    return mk::rd(b.first, b.second, body, at_point, out->as<node::Rd>()->cotangent, sp);
  }

  TermPtr fd_form(Span sp) {
    keyword("fd");
    auto [b, body] = abstraction();
    expect(Tok::LParen);
    Type u = type();
    expect(Tok::Comma);
    TermPtr at_point = term();
    expect(Tok::RParen);
    TermPtr tangent = parenthesized();
    TermPtr out = elab_fd(b.first, b.second, body, u, at_point, tangent, supply_);
    const auto* r = out->as<node::Rd>();
    return mk::rd(r->var, r->type, r->body, r->at, r->cotangent, sp);
  }

  // ---- boolean terms ----

  BoolPtr bterm() {
    Span sp = span();
    if (at_keyword("true")) {
      next();
      return mk::truth(true, sp);
    }
    if (at_keyword("false")) {
      next();
      return mk::truth(false, sp);
    }
    TermPtr lhs = sum();
    if (at(Tok::LtDot) || at(Tok::GtDot)) {
      std::string pred = at(Tok::LtDot) ? "lt" : "gt";
      next();
      TermPtr rhs = sum();
      return mk::pred(pred, mk::pair(lhs, rhs, std::nullopt, lhs->span), sp);
    }
    if (const auto* app = lhs->as<node::FunApp>(); app && reg_.pred(app->fn) && !is_function(app->fn)) {
      return mk::pred(app->fn, app->arg, sp);
    }
    fail("'<.' or '>.'");
  }

  bool is_function(const std::string& name) const {
    for (const auto& f : functions_) {
      if (f == name) return true;
    }
    return false;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Registry& reg_;
  VarSupply supply_;
  std::vector<std::string> functions_;
};

}  // namespace

TermPtr parse_term(std::string_view text, const Registry& reg) { return Parser(text, reg).program(); }

BoolPtr parse_bool(std::string_view text, const Registry& reg) { return Parser(text, reg).bool_program(); }

Type parse_type(std::string_view text) { return Parser(text, Registry::builtin()).type_program(); }

}  // namespace dpl
