#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dpl/primitives.hpp"

using namespace dpl;

namespace {

const Registry& reg() { return Registry::builtin(); }

Value r(double x) { return Value::real(x); }
Value p(double a, double b) { return Value::pair(r(a), r(b)); }

double eval1(const std::string& op, const Value& v) { return prim_eval(reg(), op, v)->as_real(); }

std::vector<double> rev(const std::string& op, const Value& v, const Value& w) {
  return flatten(*prim_reverse_eval(reg(), op, v, w));
}

// Central differences straight on prim_eval, independent of the jets.
std::vector<double> fd_vjp(const std::string& op, const Type& arg, std::vector<double> x, std::vector<double> w) {
  std::vector<double> out(x.size(), 0.0);
  for (std::size_t j = 0; j < x.size(); ++j) {
    double h = 1e-5 * std::max(1.0, std::fabs(x[j]));
    auto xp = x;
    auto xm = x;
    xp[j] += h;
    xm[j] -= h;
    auto fp = flatten(*prim_eval(reg(), op, unflatten(arg, xp)));
    auto fm = flatten(*prim_eval(reg(), op, unflatten(arg, xm)));
    for (std::size_t i = 0; i < fp.size(); ++i) out[j] += w[i] * (fp[i] - fm[i]) / (2 * h);
  }
  return out;
}

void expect_close(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-4) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    double scale = std::max({std::fabs(a[i]), std::fabs(b[i]), 1e-3});
    EXPECT_LE(std::fabs(a[i] - b[i]) / scale, tol) << "component " << i << ": " << a[i] << " vs " << b[i];
  }
}

}  // namespace

TEST(Primitives, ForwardValues) {
  EXPECT_EQ(eval1("neg", r(2)), -2.0);
  EXPECT_EQ(eval1("mul", p(3, 4)), 12.0);
  EXPECT_EQ(eval1("div", p(1, 4)), 0.25);
  EXPECT_EQ(eval1("exp", r(0)), 1.0);
  EXPECT_EQ(eval1("log", r(1)), 0.0);
  EXPECT_EQ(eval1("sin", r(0)), 0.0);
  EXPECT_EQ(eval1("cos", r(0)), 1.0);
  Value u = Value::pair(p(1, 2), r(3));
  Value v = Value::pair(p(4, 5), r(6));
  EXPECT_EQ(eval1("DProd3", Value::pair(u, v)), 32.0);
  EXPECT_EQ(eval1("DProd1", p(2, 5)), 10.0);
}

TEST(Primitives, DomainsAreOpen) {
  EXPECT_FALSE(prim_eval(reg(), "div", p(1, 0)).has_value());
  EXPECT_FALSE(prim_eval(reg(), "log", r(0)).has_value());
  EXPECT_FALSE(prim_eval(reg(), "log", r(-1)).has_value());
  EXPECT_TRUE(prim_eval(reg(), "log", r(1e-300)).has_value());
  EXPECT_FALSE(prim_reverse_eval(reg(), "div", p(1, 0), r(1)).has_value());
}

TEST(Primitives, DottedComparisonsUndefinedOnDiagonal) {
  EXPECT_EQ(prim_bool_eval(reg(), "lt", p(1, 2)), std::optional<bool>(true));
  EXPECT_EQ(prim_bool_eval(reg(), "lt", p(2, 1)), std::optional<bool>(false));
  EXPECT_EQ(prim_bool_eval(reg(), "gt", p(2, 1)), std::optional<bool>(true));
  EXPECT_FALSE(prim_bool_eval(reg(), "lt", p(0, 0)).has_value());
  EXPECT_FALSE(prim_bool_eval(reg(), "gt", p(-3, -3)).has_value());
  EXPECT_EQ(reg().pred("lt")->display, "<.");
  EXPECT_EQ(reg().pred("gt")->display, ">.");
}

TEST(Primitives, UnknownNamesThrow) {
  EXPECT_THROW(prim_eval(reg(), "tan", r(1)), std::invalid_argument);
  EXPECT_EQ(reg().op("tan_r"), nullptr);
  EXPECT_EQ(reg().op("mul_"), nullptr);
  EXPECT_EQ(reg().op("DProd9"), nullptr);
}

TEST(Primitives, ReverseTypes) {
  const PrimOp* m = reg().op("mul_r");
  ASSERT_NE(m, nullptr);
  EXPECT_EQ(m->arg, Type::prod(Type::real_power(2), Type::real()));
  EXPECT_EQ(m->result, Type::real_power(2));
  const PrimOp* mm = reg().op("mul_r_r");
  ASSERT_NE(mm, nullptr);
  EXPECT_EQ(mm->arg, Type::prod(m->arg, m->result));
  EXPECT_EQ(mm->result, m->arg);
}

TEST(Primitives, FirstOrderReversesMatchHandDerivatives) {
  // w * f'(a) written out by hand.
  expect_close(rev("neg", r(1.5), r(2)), {-2});
  expect_close(rev("mul", p(3, 4), r(2)), {8, 6});
  expect_close(rev("div", p(3, 4), r(2)), {2.0 / 4, -2.0 * 3 / 16});
  expect_close(rev("exp", r(0.7), r(2)), {2 * std::exp(0.7)});
  expect_close(rev("log", r(0.7), r(2)), {2 / 0.7});
  expect_close(rev("sin", r(0.7), r(2)), {2 * std::cos(0.7)});
  expect_close(rev("cos", r(0.7), r(2)), {-2 * std::sin(0.7)});
}

TEST(Primitives, DProd2ReverseSpecialization) {
  // DProd2_r(<<<a,b>,<1,2>>, c>) = <c*<1,2>, c*<a,b>>
  Value u = p(5, 7);
  Value v = p(1, 2);
  auto out = rev("DProd2", Value::pair(u, v), r(3));
  expect_close(out, {3, 6, 15, 21});
}

TEST(Primitives, ReverseMatchesFiniteDifferencesAtRandomPoints) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (const auto& name : reg().base_ops()) {
    const PrimOp* op = reg().op(name);
    for (int k = 0; k < 100; ++k) {
      std::vector<double> x(op->arg.size());
      for (auto& xi : x) xi = dist(rng);
      if (name == "log") x[0] = std::fabs(x[0]) + 0.1;
      if (name == "div") x[1] = (x[1] < 0 ? -1 : 1) * (std::fabs(x[1]) + 0.1);
      std::vector<double> w(op->result.size());
      for (auto& wi : w) wi = dist(rng);
      auto got = rev(name, unflatten(op->arg, x), unflatten(op->result, w));
      expect_close(got, fd_vjp(name, op->arg, x, w));
    }
  }
}

TEST(Primitives, SecondOrderReverseMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.3, 2.0);
  for (std::string name : {"mul_r", "div_r", "exp_r", "log_r", "sin_r", "cos_r", "DProd2_r", "sin_r_r"}) {
    const PrimOp* op = reg().op(name);
    ASSERT_NE(op, nullptr) << name;
    for (int k = 0; k < 20; ++k) {
      std::vector<double> x(op->arg.size());
      for (auto& xi : x) xi = dist(rng);
      std::vector<double> w(op->result.size());
      for (auto& wi : w) wi = dist(rng);
      auto got = rev(name, unflatten(op->arg, x), unflatten(op->result, w));
      expect_close(got, fd_vjp(name, op->arg, x, w));
    }
  }
}

TEST(Primitives, MarginsReachTheMonitor) {
  struct Rec : ProbeMonitor {
    std::vector<std::pair<std::string, double>> seen;
    void margin(const std::string& p, double m) override { seen.emplace_back(p, m); }
  } rec;
  prim_eval(reg(), "div", p(1, -0.25), &rec);
  prim_eval(reg(), "log", r(3), &rec);
  prim_bool_eval(reg(), "lt", p(1, 1.5), &rec);
  prim_eval(reg(), "sin", r(3), &rec);
  ASSERT_EQ(rec.seen.size(), 3u);
  EXPECT_EQ(rec.seen[0].second, 0.25);
  EXPECT_EQ(rec.seen[1].second, 3.0);
  EXPECT_EQ(rec.seen[2].second, 0.5);
}

TEST(Primitives, FlattenRoundTrips) {
  Type t = Type::prod(Type::prod(Type::real(), Type::unit()), Type::prod(Type::real(), Type::real()));
  std::vector<double> leaves = {1, 2, 3};
  Value v = unflatten(t, leaves);
  EXPECT_EQ(flatten(v), leaves);
  EXPECT_TRUE(flatten(Value::unit()).empty());
}
