#include <gtest/gtest.h>

#include "dpl/parser.hpp"
#include "dpl/suites.hpp"
#include "dpl/typecheck.hpp"

using namespace dpl;

namespace {

SuiteConfig small(SuiteConfig cfg, int count) {
  cfg.count = count;
  return cfg;
}

}  // namespace

TEST(Suites, StopExactlyAtTheRequestedCount) {
  SuiteReport r = run_vjp_suite(small(vjp_defaults(), 25));
  EXPECT_EQ(r.checked(), 25);
  EXPECT_EQ(r.seeds, r.checked() + r.discarded);
  EXPECT_EQ(static_cast<int>(r.lines.size()), r.seeds);
  EXPECT_EQ(r.failed, 0) << r.text();
  EXPECT_GT(r.rdiff_calls, 0);
}

TEST(Suites, LinesCarryTheirOutcome) {
  SuiteReport r = run_interpolation_suite(small(interpolation_defaults(), 20));
  for (const auto& l : r.lines) {
    EXPECT_TRUE(l.starts_with("PASS ") || l.starts_with("SKIP ") || l.starts_with("DISCARD ")) << l;
  }
  EXPECT_NE(r.text().find(r.summary()), std::string::npos);
}

TEST(Suites, ReportsDoNotDependOnThreadCount) {
  SuiteConfig a = small(adjoint_defaults(), 10);
  SuiteConfig b = a;
  a.threads = 1;
  b.threads = 4;
  SuiteReport ra = run_adjoint_suite(a);
  SuiteReport rb = run_adjoint_suite(b);
  EXPECT_EQ(ra.text(), rb.text());
  EXPECT_EQ(ra.digest(), rb.digest());
}

TEST(Suites, FirstSeedShiftsTheCases) {
  SuiteConfig a = small(vjp_defaults(), 5);
  SuiteConfig b = a;
  b.first_seed = 1000;
  EXPECT_NE(run_vjp_suite(a).digest(), run_vjp_suite(b).digest());
}

TEST(Suites, CasesAreDeterministic) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EXPECT_EQ(vjp_case(seed, 3, 50'000).line, vjp_case(seed, 3, 50'000).line);
  }
}

TEST(Suites, RdiffTypingHookCountsCalls) {
  Session s;
  CaseResult res;
  check_rdiff_typing(s, res);
  eval(s, {}, {}, infer_term({}, {}, parse_term("rd(x: real. x * rd(y: real. x + y)(1)(1))(1)(1)")).term);
  EXPECT_EQ(res.rdiff_calls, 2);
  EXPECT_TRUE(res.rdiff_errors.empty());
}
