#include <gtest/gtest.h>

#include "dpl/ast.hpp"
#include "dpl/elaborate.hpp"
#include "dpl/parser.hpp"
#include "dpl/persistent_map.hpp"
#include "dpl/type.hpp"
#include "dpl/typecheck.hpp"

using namespace dpl;

TEST(Type, SizesAndRendering) {
  EXPECT_EQ(Type::real().size(), 1u);
  EXPECT_EQ(Type::unit().size(), 0u);
  Type t = Type::prod(Type::real(), Type::prod(Type::unit(), Type::real()));
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.str(), "real * (unit * real)");
  EXPECT_EQ(Type::real_power(3).str(), "real^3");
  EXPECT_EQ(Type::real_power(1), Type::real());
  EXPECT_EQ(Type::real_power(0), Type::unit());
}

TEST(Type, IteratedProductsAssociateLeft) {
  std::vector<Type> parts = {Type::real(), Type::unit(), Type::real()};
  Type t = Type::iterated(parts);
  EXPECT_EQ(t, Type::prod(Type::prod(Type::real(), Type::unit()), Type::real()));
  EXPECT_EQ(real_power_exponent(Type::real_power(4)), 4u);
  EXPECT_EQ(real_power_exponent(t), 0u);
  EXPECT_EQ(Type::iterated(std::span<const Type>{}), Type::unit());
}

TEST(Type, EqualityIsStructural) {
  EXPECT_EQ(Type::prod(Type::real(), Type::real()), Type::real_power(2));
  EXPECT_NE(Type::prod(Type::real(), Type::unit()), Type::prod(Type::unit(), Type::real()));
  EXPECT_NE(Type::real(), Type::unit());
}

TEST(PersistentMap, InsertLeavesOldVersionIntact) {
  PersistentMap<std::string, int> a;
  auto b = a.insert("x", 1);
  auto c = b.insert("x", 2).insert("y", 3);
  EXPECT_EQ(a.find("x"), nullptr);
  EXPECT_EQ(*b.find("x"), 1);
  EXPECT_EQ(*c.find("x"), 2);
  EXPECT_EQ(c.size(), 2u);
  std::vector<std::string> keys;
  c.for_each([&](const std::string& k, int) { keys.push_back(k); });
  EXPECT_EQ(keys, (std::vector<std::string>{"x", "y"}));
}

TEST(PersistentMap, ManyKeysStayOrdered) {
  PersistentMap<int, int> m;
  for (int i = 0; i < 500; ++i) m = m.insert((i * 7919) % 500, i);
  EXPECT_EQ(m.size(), 500u);
  int prev = -1;
  m.for_each([&](int k, int) {
    EXPECT_GT(k, prev);
    prev = k;
  });
}

TEST(Ast, ValueFlags) {
  TermPtr p = mk::pair(mk::constant(1), mk::var("x"));
  EXPECT_TRUE(p->is_value);
  EXPECT_FALSE(p->is_ground);
  EXPECT_TRUE(p->is_trace);
  TermPtr q = mk::add(mk::constant(1), mk::constant(2));
  EXPECT_FALSE(q->is_value);
  EXPECT_TRUE(q->is_trace);
  TermPtr r = mk::cond(mk::truth(true), mk::constant(1), mk::constant(2));
  EXPECT_FALSE(r->is_trace);
}

TEST(Ast, ValuePairIsDecoratedWhenClosed) {
  Value v = Value::pair(Value::real(1), Value::unit());
  const auto* p = v.term()->as<node::Pair>();
  ASSERT_NE(p, nullptr);
  ASSERT_TRUE(p->types.has_value());
  EXPECT_EQ(p->types->left, Type::real());
  EXPECT_EQ(p->types->right, Type::unit());
}

TEST(Ast, SameValueIsBitExact) {
  EXPECT_TRUE(same_value(Value::real(0.1 + 0.2), Value::real(0.1 + 0.2)));
  EXPECT_FALSE(same_value(Value::real(0.1 + 0.2), Value::real(0.3)));
  EXPECT_FALSE(same_value(Value::real(0.0), Value::real(-0.0)));
}

TEST(Ast, FreeVariables) {
  TermPtr m = parse_term("let y: real = x + 1 in letrec f(z: real): real = z in f(y) + w");
  FreeVars fv = free_vars(m);
  EXPECT_EQ(fv.vars, (std::set<std::string>{"w", "x"}));
  EXPECT_TRUE(fv.funs.empty());
  FreeVars g = free_vars(parse_term("g(rd(x: real. x + y)(1)(x))"));
  EXPECT_EQ(g.vars, (std::set<std::string>{"x", "y"}));
  EXPECT_EQ(g.funs, (std::set<std::string>{"g"}));
}

TEST(Ast, AlphaEquality) {
  EXPECT_TRUE(alpha_equal(parse_term("let a: real = 1 in a + a"), parse_term("let b: real = 1 in b + b")));
  EXPECT_FALSE(alpha_equal(parse_term("let a: real = 1 in a + z"), parse_term("let b: real = 1 in b + b")));
  EXPECT_TRUE(alpha_equal(parse_term("rd(x: real. x * y)(1)(2)"), parse_term("rd(u: real. u * y)(1)(2)")));
  EXPECT_FALSE(alpha_equal(parse_term("rd(x: real. x)(1)(2)"), parse_term("rd(x: unit. x)(1)(2)")));
  EXPECT_TRUE(alpha_equal(parse_term("letrec f(x: real): real = f(x) in f(1)"),
                          parse_term("letrec g(y: real): real = g(y) in g(1)")));
}

TEST(Ast, RenameFreeRespectsShadowing) {
  TermPtr m = parse_term("x + (let x: real = 2 in x)");
  TermPtr r = rename_free(m, "x", "q");
  EXPECT_TRUE(alpha_equal(r, parse_term("q + (let x: real = 2 in x)")));
}

TEST(Ast, VarSupplySkipsAvoidedNames) {
  VarSupply s;
  s.avoid("%0");
  s.avoid("%2");
  s.avoid("x");
  EXPECT_EQ(s.fresh(), "%1");
  EXPECT_EQ(s.fresh(), "%3");
}

TEST(Elaborate, ZeroOfType) {
  Value z = zero_of_type(Type::prod(Type::real(), Type::prod(Type::unit(), Type::real())));
  EXPECT_TRUE(alpha_equal(z.term(), parse_term("<0, <(), 0>>")));
}

TEST(Elaborate, AddAtProductTypeChecks) {
  VarSupply s;
  Type t = Type::prod(Type::real(), Type::unit());
  TermPtr sum = add_at_type(t, mk::var("a"), mk::var("b"), s);
  TypeEnv g = TypeEnv{}.insert("a", t).insert("b", t);
  EXPECT_EQ(infer_term({}, g, sum).type, t);
}

TEST(Elaborate, TupleLetRejectsDuplicateBinders) {
  VarSupply s;
  EXPECT_THROW(elab_tuple_let({{"a", Type::real()}, {"a", Type::real()}}, mk::var("p"), mk::var("a"), s),
               std::invalid_argument);
}

TEST(Elaborate, TupleLetOfThreeBindsLeftNested) {
  VarSupply s;
  TermPtr m = elab_tuple_let({{"a", Type::real()}, {"b", Type::unit()}, {"c", Type::real()}},
                             mk::var("p"), mk::add(mk::var("a"), mk::var("c")), s);
  Type pt = Type::prod(Type::prod(Type::real(), Type::unit()), Type::real());
  EXPECT_EQ(infer_term({}, TypeEnv{}.insert("p", pt), m).type, Type::real());
}
