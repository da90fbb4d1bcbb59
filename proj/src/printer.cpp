#include "dpl/printer.hpp"

#include <charconv>
#include <cmath>

#include "dpl/errors.hpp"

namespace dpl {

std::string format_real(double r) {
  if (std::isinf(r)) return r > 0 ? "1e999" : "-1e999";
  if (std::isnan(r)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, r);
  return std::string(buf, res.ptr);
}

namespace {

// Binding forms extend as far right as possible, so they only appear
// bare in tail or delimited positions.
enum Prec { kTail = 0, kSum = 1, kProd = 2, kUnary = 3 };

class Printer {
 public:
  void term(const TermPtr& t, int prec) {
    if (const auto* n = t->as<node::Var>()) {
      out_ += n->name;
    } else if (const auto* n = t->as<node::Const>()) {
      out_ += format_real(n->value);
    } else if (t->as<node::UnitVal>()) {
      out_ += "()";
    } else if (const auto* n = t->as<node::Add>()) {
      open(prec > kSum);
      term(n->lhs, kSum);
      out_ += " + ";
      term(n->rhs, kProd);
      close(prec > kSum);
    } else if (const auto* n = t->as<node::PrimApp>()) {
      const auto* p = n->arg->as<node::Pair>();
      if (n->op == "mul" && p) {
        open(prec > kProd);
        term(p->first, kProd);
        out_ += " * ";
        term(p->second, kUnary);
        close(prec > kProd);
      } else {
        out_ += n->op;
        out_ += "(";
        term(n->arg, kTail);
        out_ += ")";
      }
    } else if (const auto* n = t->as<node::Let>()) {
      open(prec > kTail);
      out_ += "let " + n->var + ": " + n->type.str() + " = ";
      term(n->bound, kTail);
      out_ += " in ";
      term(n->body, kTail);
      close(prec > kTail);
    } else if (const auto* n = t->as<node::Pair>()) {
      out_ += "<";
      term(n->first, kTail);
      out_ += ", ";
      term(n->second, kTail);
      out_ += ">";
    } else if (const auto* n = t->as<node::Fst>()) {
      out_ += "fst ";
      term(n->arg, kUnary);
    } else if (const auto* n = t->as<node::Snd>()) {
      out_ += "snd ";
      term(n->arg, kUnary);
    } else if (const auto* n = t->as<node::If>()) {
      open(prec > kTail);
      out_ += "if ";
      boolean(n->cond);
      out_ += " then ";
      term(n->then_branch, kTail);
      out_ += " else ";
      term(n->else_branch, kTail);
      close(prec > kTail);
    } else if (const auto* n = t->as<node::LetRec>()) {
      open(prec > kTail);
      out_ += "letrec " + n->fn + "(" + n->param + ": " + n->param_type.str() + "): " + n->result_type.str() + " = ";
      term(n->body, kTail);
      out_ += " in ";
      term(n->scope, kTail);
      close(prec > kTail);
    } else if (const auto* n = t->as<node::FunApp>()) {
      out_ += n->fn + "(";
      term(n->arg, kTail);
      out_ += ")";
    } else if (const auto* n = t->as<node::Rd>()) {
      out_ += "rd(" + n->var + ": " + n->type.str() + ". ";
      term(n->body, kTail);
      out_ += ")(";
      term(n->at, kTail);
      out_ += ")(";
      term(n->cotangent, kTail);
      out_ += ")";
    } else {
      throw InternalError("print: unknown node");
    }
  }

  void boolean(const BoolPtr& b) {
    if (b->as<node::True>()) {
      out_ += "true";
    } else if (b->as<node::False>()) {
      out_ += "false";
    } else {
      const auto* p = b->as<node::PredApp>();
      const auto* pair = p->arg->as<node::Pair>();
      const char* infix = p->pred == "lt" ? " <. " : p->pred == "gt" ? " >. " : nullptr;
      if (pair && infix) {
        term(pair->first, kSum);
        out_ += infix;
        term(pair->second, kSum);
      } else {
        out_ += p->pred + "(";
        term(p->arg, kTail);
        out_ += ")";
      }
    }
  }

  std::string take() { return std::move(out_); }

 private:
  void open(bool b) {
    if (b) out_ += "(";
  }
  void close(bool b) {
    if (b) out_ += ")";
  }

  std::string out_;
};

}  // namespace

std::string print_term(const TermPtr& m) {
  Printer p;
  p.term(m, kTail);
  return p.take();
}

std::string print_bool(const BoolPtr& b) {
  Printer p;
  p.boolean(b);
  return p.take();
}

}  // namespace dpl
