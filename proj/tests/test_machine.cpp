#include <gtest/gtest.h>

#include <chrono>

#include "dpl/machine.hpp"
#include "dpl/parser.hpp"
#include "dpl/printer.hpp"
#include "dpl/typecheck.hpp"

using namespace dpl;

namespace {

TermPtr typed(const std::string& src, const TypeEnv& gamma = {}) { return infer_term({}, gamma, parse_term(src)).term; }

Value run(const std::string& src, const ValueEnv& rho = {}, std::uint64_t fuel = Session::kDefaultFuel) {
  TypeEnv gamma;
  rho.for_each([&](const std::string& k, const Value& v) { gamma = gamma.insert(k, type_of_closed_value(v)); });
  Session s(fuel);
  return eval(s, {}, rho, typed(src, gamma));
}

double run_real(const std::string& src, const ValueEnv& rho = {}) { return run(src, rho).as_real(); }

TraceTerm trace(const std::string& src, const ValueEnv& rho = {}) {
  TypeEnv gamma;
  rho.for_each([&](const std::string& k, const Value& v) { gamma = gamma.insert(k, type_of_closed_value(v)); });
  Session s;
  return sym_eval(s, {}, rho, typed(src, gamma));
}

ValueEnv env(const std::string& x, double v) { return ValueEnv{}.insert(x, Value::real(v)); }

}  // namespace

TEST(Decompose, ValueIsValue) {
  auto d = decompose(typed("3"));
  ASSERT_TRUE(std::holds_alternative<IsValue>(d));
  EXPECT_EQ(std::get<IsValue>(d).value.as_real(), 3.0);
}

TEST(Decompose, LeftOperandFirst) {
  TermPtr m = typed("(1 + 2) + x", TypeEnv{}.insert("x", Type::real()));
  auto d = decompose(m);
  ASSERT_TRUE(std::holds_alternative<TermRedex>(d));
  const auto& r = std::get<TermRedex>(d);
  ASSERT_EQ(r.context.frames().size(), 1u);
  EXPECT_EQ(r.context.frames()[0].slot, Slot::AddLeft);
  EXPECT_TRUE(alpha_equal(r.redex, parse_term("1 + 2")));
  EXPECT_TRUE(alpha_equal(r.context.plug(r.redex), m));
}

TEST(Decompose, RightOperandOnceLeftIsValue) {
  TermPtr m = typed("x + sin(1)", TypeEnv{}.insert("x", Type::real()));
  auto r = std::get<TermRedex>(decompose(m));
  ASSERT_EQ(r.context.frames().size(), 1u);
  EXPECT_EQ(r.context.frames()[0].slot, Slot::AddRight);
  EXPECT_TRUE(alpha_equal(r.redex, parse_term("sin(1)")));
}

TEST(Decompose, GuardIsABooleanRedex) {
  TermPtr m = typed("if lt(<1, 0>) then 2 else 3");
  auto d = decompose(m);
  ASSERT_TRUE(std::holds_alternative<BoolRedex>(d));
  const auto& r = std::get<BoolRedex>(d);
  ASSERT_EQ(r.context.frames().size(), 1u);
  EXPECT_EQ(r.context.frames()[0].slot, Slot::IfCond);
  EXPECT_TRUE(alpha_equal(r.context.plug_bool(r.redex), m));
}

TEST(Decompose, InsideGuardArgument) {
  TermPtr m = typed("if lt(<1 + 1, 0>) then 2 else 3");
  auto r = std::get<TermRedex>(decompose(m));
  EXPECT_TRUE(alpha_equal(r.redex, parse_term("1 + 1")));
  EXPECT_TRUE(alpha_equal(r.context.plug(r.redex), m));
}

TEST(Decompose, IfWithBooleanValueIsARedex) {
  TermPtr m = typed("if true then 1 else 2");
  auto r = std::get<TermRedex>(decompose(m));
  EXPECT_TRUE(r.context.empty());
}

TEST(Decompose, RdPointThenCotangent) {
  TermPtr m = typed("rd(x: real. x)(1 + 1)(2 + 2)");
  auto r = std::get<TermRedex>(decompose(m));
  EXPECT_EQ(r.context.frames()[0].slot, Slot::RdAt);
  TermPtr m2 = typed("rd(x: real. x)(1)(2 + 2)");
  EXPECT_EQ(std::get<TermRedex>(decompose(m2)).context.frames()[0].slot, Slot::RdCotangent);
}

TEST(Eval, Arithmetic) {
  EXPECT_EQ(run_real("1 + 2"), 3.0);
  EXPECT_EQ(run_real("let x: real = 2 in x * x + 1"), 5.0);
  EXPECT_EQ(run_real("fst <1, ()> + snd <(), 2>"), 3.0);
  EXPECT_EQ(run_real("x - 1", env("x", 4)), 3.0);
}

TEST(Eval, NestedDifferentiationExamples) {
  auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(run_real("rd(x: real. x * rd(y: real. x + y)(1)(1))(1)(1)"), 1.0);
  EXPECT_EQ(run_real("letrec f(x: real): real = rd(y: real. x + y)(1)(1) in rd(x: real. x + f(x))(1)(1)"), 1.0);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 0.1);
}

TEST(Eval, ReluApproximationIsUndefinedAtZero) {
  const std::string relu = "let f(x: real): real = if x <. 0 then 0 else x in f(y)";
  EXPECT_EQ(run_real(relu, env("y", -1)), 0.0);
  EXPECT_EQ(run_real(relu, env("y", 2)), 2.0);
  try {
    run_real(relu, env("y", 0));
    FAIL();
  } catch (const Stuck& e) {
    EXPECT_EQ(e.primitive(), "<.");
    EXPECT_STREQ(e.what(), "undefined: <. at (0, 0)");
  }
}

TEST(Eval, PrimitiveOutsideDomainIsStuck) {
  EXPECT_THROW(run("log(0)"), Stuck);
  EXPECT_THROW(run("div(<1, x - x>)", env("x", 3)), Stuck);
}

TEST(Eval, Booleans) {
  Session s;
  EXPECT_TRUE(eval_bool(s, {}, {}, parse_bool("true")));
  EXPECT_TRUE(eval_bool(s, {}, {}, infer_bool({}, {}, parse_bool("lt(<1 + 1, 3>)"))));
  EXPECT_THROW(eval_bool(s, {}, env("x", 0), infer_bool({}, TypeEnv{}.insert("x", Type::real()), parse_bool("lt(<x, x>)"))),
               Stuck);
}

TEST(Eval, FuelExhaustion) {
  EXPECT_THROW(run("letrec f(x: real): real = f(x) in f(1)", {}, 10'000), FuelExhausted);
}

TEST(Eval, DeepRecursionDoesNotUseTheHostStack) {
  double r = run_real("letrec f(x: real): real = if x <. 0.5 then 0 else 1 + f(x - 1) in f(20000)");
  EXPECT_EQ(r, 20000.0);
}

TEST(Eval, ClosuresAreStaticallyScoped) {
  EXPECT_EQ(run_real("letrec g(x: real): real = x in "
                     "letrec f(x: real): real = g(x) in "
                     "letrec g(x: real): real = 0 in f(5)"),
            5.0);
}

TEST(Eval, MutualShapeRecursion) {
  EXPECT_EQ(run_real("letrec fact(n: real): real = if n <. 0.5 then 1 else n * fact(n - 1) in fact(5)"), 120.0);
}

TEST(Eval, RdWithFreeOuterVariable) {
  EXPECT_EQ(run_real("let y: real = 2 in rd(x: real. x * y)(3)(1)"), 2.0);
  EXPECT_EQ(run_real("let x: real = 3 in rd(x: real. x * x)(x)(1)"), 6.0);
  EXPECT_EQ(run_real("let x: real = 3 in rd(y: real. x * y)(1)(x)"), 9.0);
}

TEST(Eval, RdOverProducts) {
  Value v = run("rd(p: real * real. fst p * snd p)(<3, 4>)(2)");
  EXPECT_EQ(flatten(v), (std::vector<double>{8, 6}));
  Value u = run("rd(x: real. <x, ()>)(1)(<5, ()>)");
  EXPECT_EQ(u.as_real(), 5.0);
}

TEST(Eval, SecondDerivative) {
  // d/dx (d/dx x^3) at 2 = 6x = 12
  EXPECT_EQ(run_real("rd(x: real. rd(y: real. y * y * y)(x)(1))(2)(1)"), 12.0);
}

TEST(Eval, DeterministicAcrossRuns) {
  const std::string src = "rd(x: real. sin(x) * exp(x) + log(x * x + 1))(0.7)(1.3)";
  EXPECT_TRUE(same_value(run(src), run(src)));
}

TEST(SymEval, ConditionalTracesTakenBranch) { EXPECT_TRUE(alpha_equal(trace("if true then 3 else 4").term(), parse_term("3"))); }

TEST(SymEval, FunctionCallWrapsArgument) {
  TraceTerm c = trace("letrec f(x: real): real = x * x in f(2)");
  EXPECT_TRUE(alpha_equal(c.term(), parse_term("let x: real = 2 in x * x")));
}

TEST(SymEval, LetIsKept) {
  TraceTerm c = trace("let x: real = 2 in x + x");
  EXPECT_TRUE(alpha_equal(c.term(), parse_term("let x: real = 2 in x + x")));
}

TEST(SymEval, ContextRuleBindsRedexTrace) {
  TraceTerm c = trace("(1 + 2) + 3");
  EXPECT_TRUE(alpha_equal(c.term(), parse_term("let a: real = 1 + 2 in a + 3")));
}

TEST(SymEval, GuardsUseTheEnvironment) {
  TraceTerm c = trace("if x <. 0 then 0 else x * x", env("x", 3));
  EXPECT_TRUE(alpha_equal(c.term(), parse_term("x * x")));
}

TEST(SymEval, OutputIsATrace) {
  TraceTerm c = trace("letrec f(x: real): real = if x <. 1 then x else f(x - 1) in rd(y: real. f(y) * y)(2.5)(1)");
  EXPECT_TRUE(c.term()->is_trace);
}

TEST(SymEval, RdReportsEachDifferentiation) {
  Session s;
  int calls = 0;
  s.on_rdiff = [&](const RdiffEvent& e) {
    ++calls;
    EXPECT_EQ(e.type, Type::real());
  };
  eval(s, {}, {}, typed("rd(x: real. x * rd(y: real. x + y)(1)(1))(1)(1)"));
  EXPECT_EQ(calls, 2);
}

TEST(SymEval, InterpolationOnExamples) {
  for (std::string src : {"1 + 2", "rd(x: real. x * rd(y: real. x + y)(1)(1))(1)(1)",
                          "letrec f(x: real): real = if x <. 1 then x else f(x - 1) in f(3.5) * 2"}) {
    Session s;
    Value direct = eval(s, {}, {}, typed(src));
    TraceTerm c = sym_eval(s, {}, {}, typed(src));
    EXPECT_TRUE(same_value(direct, eval(s, {}, {}, c.term()))) << src;
  }
}

TEST(SymEval, PrintedTraceReparses) {
  TraceTerm c = trace("rd(x: real. x * x)(3)(1)");
  TermPtr back = parse_term(print_trace(c));
  EXPECT_TRUE(alpha_equal(back, c.term()));
}
