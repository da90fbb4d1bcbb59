#include "dpl/typecheck.hpp"

namespace dpl {

namespace {

using Kind = TypeError::Kind;

std::string where(Span s) {
  if (s.line == 0) return "";
  return " at " + std::to_string(s.line) + ":" + std::to_string(s.column);
}

[[noreturn]] void mismatch(const Type& expected, const Type& found, Span span, const std::string& what) {
  throw TypeError(Kind::TypeMismatch,
                  "type mismatch in " + what + where(span) + ": expected " + expected.str() + ", found " +
                      found.str(),
                  span);
}

void expect(const Type& expected, const Type& found, Span span, const std::string& what) {
  if (!(expected == found)) mismatch(expected, found, span, what);
}

void check_decoration(const std::optional<ProdTypes>& given, const ProdTypes& actual, Span span,
                      const std::string& what) {
  if (!given) return;
  expect(Type::prod(given->left, given->right), Type::prod(actual.left, actual.right), span,
         what + " decoration");
}

class Checker {
 public:
  explicit Checker(const Registry& reg) : reg_(reg) {}

  Typed term(const FunTypeEnv& phi, const TypeEnv& gamma, const TermPtr& m) {
    const Span sp = m->span;
    if (const auto* n = m->as<node::Var>()) {
      const Type* t = gamma.find(n->name);
      if (!t) throw TypeError(Kind::UnboundVariable, "unbound variable '" + n->name + "'" + where(sp), sp);
      return {*t, m};
    }
    if (m->as<node::Const>()) return {Type::real(), m};
    if (m->as<node::UnitVal>()) return {Type::unit(), m};
    if (const auto* n = m->as<node::Add>()) {
      Typed l = term(phi, gamma, n->lhs);
      expect(Type::real(), l.type, n->lhs->span, "left operand of +");
      Typed r = term(phi, gamma, n->rhs);
      expect(Type::real(), r.type, n->rhs->span, "right operand of +");
      return {Type::real(), mk::add(l.term, r.term, sp)};
    }
    if (const auto* n = m->as<node::PrimApp>()) {
      const PrimOp* op = reg_.op(n->op);
      if (!op) throw TypeError(Kind::UnknownPrimitive, "unknown operation '" + n->op + "'" + where(sp), sp);
      Typed a = term(phi, gamma, n->arg);
      if (!(a.type == op->arg)) {
        throw TypeError(Kind::ArityMismatch,
                        "operation " + n->op + where(sp) + " expects " + op->arg.str() + ", found " + a.type.str(),
                        sp);
      }
      return {op->result, mk::prim(n->op, a.term, sp)};
    }
    if (const auto* n = m->as<node::Let>()) {
      Typed b = term(phi, gamma, n->bound);
      expect(n->type, b.type, n->bound->span, "let " + n->var);
      Typed body = term(phi, gamma.insert(n->var, n->type), n->body);
      return {body.type, mk::let(n->var, n->type, b.term, body.term, sp)};
    }
    if (const auto* n = m->as<node::Pair>()) {
      Typed a = term(phi, gamma, n->first);
      Typed b = term(phi, gamma, n->second);
      ProdTypes deco{a.type, b.type};
      check_decoration(n->types, deco, sp, "pair");
      return {Type::prod(a.type, b.type), mk::pair(a.term, b.term, deco, sp)};
    }
    if (const auto* n = m->as<node::Fst>()) {
      auto [deco, arg] = projection(phi, gamma, n->arg, n->types, sp, "fst");
      return {deco.left, mk::fst(arg, deco, sp)};
    }
    if (const auto* n = m->as<node::Snd>()) {
      auto [deco, arg] = projection(phi, gamma, n->arg, n->types, sp, "snd");
      return {deco.right, mk::snd(arg, deco, sp)};
    }
    if (const auto* n = m->as<node::If>()) {
      BoolPtr c = boolean(phi, gamma, n->cond);
      Typed a = term(phi, gamma, n->then_branch);
      Typed b = term(phi, gamma, n->else_branch);
      expect(a.type, b.type, n->else_branch->span, "else branch");
      return {a.type, mk::cond(c, a.term, b.term, sp)};
    }
    if (const auto* n = m->as<node::LetRec>()) {
      FreeVars fv = free_vars(n->body);
      for (const auto& v : fv.vars) {
        if (v != n->param) {
          throw TypeError(Kind::GlobalVariableInFunctionBody,
                          "variable '" + v + "' is global to the body of function " + n->fn + where(sp), sp);
        }
      }
      FunTypeEnv inner = phi.insert(n->fn, FunType{n->param_type, n->result_type});
      Typed body = term(inner, TypeEnv{}.insert(n->param, n->param_type), n->body);
      expect(n->result_type, body.type, n->body->span, "body of " + n->fn);
      Typed scope = term(inner, gamma, n->scope);
      return {scope.type,
              mk::letrec(n->fn, n->param, n->param_type, n->result_type, body.term, scope.term, sp)};
    }
    if (const auto* n = m->as<node::FunApp>()) {
      const FunType* ft = phi.find(n->fn);
      if (!ft) throw TypeError(Kind::UnboundFunction, "unbound function '" + n->fn + "'" + where(sp), sp);
      Typed a = term(phi, gamma, n->arg);
      expect(ft->arg, a.type, n->arg->span, "argument of " + n->fn);
      return {ft->result, mk::app(n->fn, a.term, sp)};
    }
    if (const auto* n = m->as<node::Rd>()) {
      Typed body = term(phi, gamma.insert(n->var, n->type), n->body);
      Typed at = term(phi, gamma, n->at);
      expect(n->type, at.type, n->at->span, "rd point");
      Typed cot = term(phi, gamma, n->cotangent);
      expect(body.type, cot.type, n->cotangent->span, "rd cotangent");
      return {n->type, mk::rd(n->var, n->type, body.term, at.term, cot.term, sp)};
    }
    throw InternalError("typecheck: unknown term node");
  }

  BoolPtr boolean(const FunTypeEnv& phi, const TypeEnv& gamma, const BoolPtr& b) {
    const auto* p = b->as<node::PredApp>();
    if (!p) return b;
    const PrimPred* pred = reg_.pred(p->pred);
    if (!pred) {
      throw TypeError(Kind::UnknownPrimitive, "unknown predicate '" + p->pred + "'" + where(b->span), b->span);
    }
    Typed a = term(phi, gamma, p->arg);
    if (!(a.type == pred->arg)) {
      throw TypeError(Kind::ArityMismatch,
                      "predicate " + pred->display + where(b->span) + " expects " + pred->arg.str() + ", found " +
                          a.type.str(),
                      b->span);
    }
    return mk::pred(p->pred, a.term, b->span);
  }

 private:
  std::pair<ProdTypes, TermPtr> projection(const FunTypeEnv& phi, const TypeEnv& gamma, const TermPtr& arg,
                                           const std::optional<ProdTypes>& given, Span sp, const std::string& what) {
    Typed a = term(phi, gamma, arg);
    if (!a.type.is_prod()) {
      throw TypeError(Kind::TypeMismatch,
                      "type mismatch in " + what + where(sp) + ": expected a product, found " + a.type.str(), sp);
    }
    ProdTypes deco{a.type.left(), a.type.right()};
    check_decoration(given, deco, sp, what);
    return {deco, a.term};
  }

  const Registry& reg_;
};

}  // namespace

Typed infer_term(const FunTypeEnv& phi, const TypeEnv& gamma, const TermPtr& m, const Registry& reg) {
  return Checker(reg).term(phi, gamma, m);
}

BoolPtr infer_bool(const FunTypeEnv& phi, const TypeEnv& gamma, const BoolPtr& b, const Registry& reg) {
  return Checker(reg).boolean(phi, gamma, b);
}

Type type_of_closed_value(const Value& v) {
  if (v.is_real()) return Type::real();
  if (v.is_unit()) return Type::unit();
  if (v.is_pair()) return Type::prod(type_of_closed_value(v.first()), type_of_closed_value(v.second()));
  throw TypeError(Kind::ValueNotClosed, "value is not closed (variable " + v.var_name() + ")");
}

}  // namespace dpl
