#include <gtest/gtest.h>

#include "dpl/parser.hpp"
#include "dpl/typecheck.hpp"

using namespace dpl;

namespace {

Type type_of(const std::string& src, const TypeEnv& gamma = {}) { return infer_term({}, gamma, parse_term(src)).type; }

TypeError::Kind error_kind(const std::string& src, const TypeEnv& gamma = {}) {
  try {
    infer_term({}, gamma, parse_term(src));
  } catch (const TypeError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no type error for " << src;
  return TypeError::Kind::TypeMismatch;
}

bool fully_decorated(const TermPtr& m) {
  bool ok = true;
  std::function<void(const TermPtr&)> walk = [&](const TermPtr& t) {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, node::Pair>) {
            ok = ok && n.types.has_value();
            walk(n.first);
            walk(n.second);
          } else if constexpr (std::is_same_v<N, node::Fst> || std::is_same_v<N, node::Snd>) {
            ok = ok && n.types.has_value();
            walk(n.arg);
          } else if constexpr (std::is_same_v<N, node::Add>) {
            walk(n.lhs);
            walk(n.rhs);
          } else if constexpr (std::is_same_v<N, node::PrimApp> || std::is_same_v<N, node::FunApp>) {
            walk(n.arg);
          } else if constexpr (std::is_same_v<N, node::Let>) {
            walk(n.bound);
            walk(n.body);
          } else if constexpr (std::is_same_v<N, node::LetRec>) {
            walk(n.body);
            walk(n.scope);
          } else if constexpr (std::is_same_v<N, node::Rd>) {
            walk(n.body);
            walk(n.at);
            walk(n.cotangent);
          } else if constexpr (std::is_same_v<N, node::If>) {
            if (const auto* p = n.cond->template as<node::PredApp>()) walk(p->arg);
            walk(n.then_branch);
            walk(n.else_branch);
          }
        },
        t->node);
  };
  walk(m);
  return ok;
}

}  // namespace

TEST(Typecheck, RdAtReal) { EXPECT_EQ(type_of("rd(x: real. x + x)(3)(1)"), Type::real()); }

TEST(Typecheck, RdResultHasTheVariablesType) {
  EXPECT_EQ(type_of("rd(x: real * unit. <fst x, fst x>)(<1, ()>)(<1, 2>)"), Type::prod(Type::real(), Type::unit()));
}

TEST(Typecheck, ApproximateRelu) {
  EXPECT_EQ(type_of("if x <. 0 then 0 else x", TypeEnv{}.insert("x", Type::real())), Type::real());
}

TEST(Typecheck, GlobalVariableInFunctionBody) {
  EXPECT_EQ(error_kind("letrec f(x: real): real = y in f(0)", TypeEnv{}.insert("y", Type::real())),
            TypeError::Kind::GlobalVariableInFunctionBody);
  EXPECT_EQ(error_kind("let y: real = 1 in letrec f(x: real): real = y in f(0)"),
            TypeError::Kind::GlobalVariableInFunctionBody);
}

TEST(Typecheck, FunctionBodiesSeeEarlierFunctions) {
  EXPECT_EQ(type_of("letrec g(x: real): real = x in letrec f(x: real): real = g(f(x)) in f(1)"), Type::real());
}

TEST(Typecheck, Errors) {
  EXPECT_EQ(error_kind("x + 1"), TypeError::Kind::UnboundVariable);
  EXPECT_EQ(error_kind("f(1)"), TypeError::Kind::UnboundFunction);
  EXPECT_EQ(error_kind("() + 1"), TypeError::Kind::TypeMismatch);
  EXPECT_EQ(error_kind("mul(1)"), TypeError::Kind::ArityMismatch);
  EXPECT_EQ(error_kind("if lt(1) then 1 else 2"), TypeError::Kind::ArityMismatch);
  EXPECT_EQ(error_kind("if 1 <. 2 then 1 else ()"), TypeError::Kind::TypeMismatch);
  EXPECT_EQ(error_kind("rd(x: real. x)(())(1)"), TypeError::Kind::TypeMismatch);
  EXPECT_EQ(error_kind("rd(x: real. <x, x>)(1)(1)"), TypeError::Kind::TypeMismatch);
  EXPECT_EQ(error_kind("letrec f(x: real): unit = x in f(1)"), TypeError::Kind::TypeMismatch);
  EXPECT_EQ(error_kind("fst 1"), TypeError::Kind::TypeMismatch);
}

TEST(Typecheck, PredicateArity) {
  TypeEnv g = TypeEnv{}.insert("x", Type::real());
  EXPECT_NO_THROW(infer_bool({}, g, parse_bool("lt(<x, 0>)")));
  EXPECT_THROW(infer_bool({}, g, parse_bool("lt(x)")), TypeError);
  EXPECT_NO_THROW(infer_bool({}, {}, parse_bool("true")));
}

TEST(Typecheck, DecoratesEveryPairAndProjection) {
  Typed t = infer_term({}, {}, parse_term("let p: real * (real * unit) = <1, <2, ()>> in fst (snd p) + fst p"));
  EXPECT_TRUE(fully_decorated(t.term));
  const auto* let = t.term->as<node::Let>();
  ASSERT_NE(let, nullptr);
  const auto* pair = let->bound->as<node::Pair>();
  ASSERT_NE(pair, nullptr);
  EXPECT_EQ(pair->types->right, Type::prod(Type::real(), Type::unit()));
}

TEST(Typecheck, WrongDecorationIsRejected) {
  TermPtr m = mk::fst(mk::pair(mk::constant(1), mk::constant(2)), ProdTypes{Type::real(), Type::unit()});
  EXPECT_THROW(infer_term({}, {}, m), TypeError);
}

TEST(Typecheck, ShadowingOverwrites) {
  EXPECT_EQ(type_of("let x: real = 1 in let x: unit = () in x"), Type::unit());
}

TEST(Typecheck, TypeOfClosedValue) {
  EXPECT_EQ(type_of_closed_value(Value::real(3.5)), Type::real());
  EXPECT_EQ(type_of_closed_value(Value::pair(Value::real(1), Value::unit())), Type::prod(Type::real(), Type::unit()));
  try {
    type_of_closed_value(Value::var("x"));
    FAIL();
  } catch (const TypeError& e) {
    EXPECT_EQ(e.kind(), TypeError::Kind::ValueNotClosed);
  }
}

TEST(Typecheck, ReverseOperationsAreTyped) {
  EXPECT_EQ(type_of("mul_r(<<1, 2>, 3>)"), Type::real_power(2));
  EXPECT_EQ(type_of("sin_r_r(<<1, 2>, 3>)"), Type::real_power(2));
  // An unregistered name parses as a function call.
  EXPECT_EQ(error_kind("tan(1)"), TypeError::Kind::UnboundFunction);
  try {
    infer_term({}, {}, mk::prim("tan", mk::constant(1)));
    ADD_FAILURE();
  } catch (const TypeError& e) {
    EXPECT_EQ(e.kind(), TypeError::Kind::UnknownPrimitive);
  }
}
