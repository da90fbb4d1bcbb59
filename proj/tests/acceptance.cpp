// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "dpl/cli.hpp"
#include "dpl/machine.hpp"
#include "dpl/parser.hpp"
#include "dpl/suites.hpp"
#include "dpl/typecheck.hpp"

using namespace dpl;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& what, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", n, what.c_str(), detail.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void nested_examples() {
  const char* srcs[] = {
      "rd(x: real. x * rd(y: real. x + y)(1)(1))(1)(1)",
      "letrec f(x: real): real = rd(y: real. x + y)(1)(1) in rd(x: real. x + f(x))(1)(1)",
  };
  bool ok = true;
  std::string detail;
  for (const char* src : srcs) {
    // Whole pipeline: parse, typecheck, evaluate. Averaged over repeats
    // after one warm-up run.
    auto once = [&] {
      Session s;
      return eval(s, {}, {}, infer_term({}, {}, parse_term(src)).term);
    };
    Value v = once();
    const int reps = 200;
    auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) once();
    double ms = seconds_since(t0) * 1000 / reps;
    bool exact = v.is_real() && v.as_real() == 1.0;
    ok = ok && exact && ms < 1.0;
    detail += fmt("%s%s=%.17g in %.4f ms", detail.empty() ? "" : "; ", exact ? "value" : "WRONG value",
                  v.is_real() ? v.as_real() : NAN, ms);
  }
  report(1, ok, "nested differentiation examples", detail);
}

void relu() {
  const std::string path = std::string(DPL_SAMPLES_DIR) + "/relu_dot.dpl";
  auto run = [&](const std::string& x, std::string& out, std::string& err) {
    std::istringstream in;
    std::ostringstream o, e;
    int code = cli_main({"run", path, "--env", "x=" + x}, in, o, e);
    out = o.str();
    err = e.str();
    return code;
  };
  std::string o1, e1, o2, e2, o3, e3;
  int c1 = run("-1", o1, e1);
  int c2 = run("2", o2, e2);
  int c3 = run("0", o3, e3);
  bool ok = c1 == 0 && o1 == "0\n" && c2 == 0 && o2 == "1\n" && c3 == exit_code::kStuck && o3.empty();
  // Bit-exactness of the gradient values through the API as well.
  auto grad_at = [](double x) {
    TypeEnv g = TypeEnv{}.insert("x", Type::real());
    Session s;
    return eval(s, {}, ValueEnv{}.insert("x", Value::real(x)),
                infer_term({}, g, parse_term("grad(z: real. if z <. 0 then 0 else z)(x)")).term)
        .as_real();
  };
  ok = ok && grad_at(-1) == 0.0 && grad_at(2) == 1.0;
  std::string tail = e3;
  if (!tail.empty() && tail.back() == '\n') tail.pop_back();
  report(2, ok, "approximate ReLU gradient",
         fmt("x=-1 -> %s (exit %d), x=2 -> %s (exit %d), x=0 -> exit %d \"%s\"",
             o1.empty() ? "-" : o1.substr(0, o1.size() - 1).c_str(), c1,
             o2.empty() ? "-" : o2.substr(0, o2.size() - 1).c_str(), c2, c3, tail.c_str()));
}

void training() {
  std::string src = read_file(std::string(DPL_SAMPLES_DIR) + "/train.dpl");
  auto t0 = Clock::now();
  Session s;
  Value v = eval(s, {}, {}, infer_term({}, {}, parse_term(src)).term);
  double secs = seconds_since(t0);
  double w = v.first().as_real();
  bool ok = std::fabs(w - 3.0) <= 1e-3 && secs < 1.0;
  report(3, ok, "training example", fmt("w=%.12g |w-3|=%.3g in %.3f s", w, std::fabs(w - 3.0), secs));
}

struct Runs {
  SuiteReport vjp, interp, adjoint;
};

Runs run_suites(unsigned threads) {
  SuiteConfig v = vjp_defaults();
  SuiteConfig i = interpolation_defaults();
  SuiteConfig a = adjoint_defaults();
  a.count = 300;
  v.threads = i.threads = a.threads = threads;
  return {run_vjp_suite(v), run_interpolation_suite(i), run_adjoint_suite(a)};
}

void first_failures(const SuiteReport& r) {
  int shown = 0;
  for (const auto& l : r.lines) {
    if (l.starts_with("FAIL ") && shown++ < 5) std::printf("    %s\n", l.c_str());
  }
}

void suites() {
  Runs first = run_suites(0);

  {
    const SuiteReport& r = first.vjp;
    // Fuel-exhausted derivative computations are discarded, not skipped;
    // the skip rate here counts them as skips, which is the stricter reading.
    double skip_rate = r.checked() + r.discarded
                           ? double(r.skipped + r.discarded) / double(r.checked() + r.discarded)
                           : 1.0;
    bool ok = r.checked() >= 1000 && r.failed == 0 && skip_rate < 0.20 && r.seconds < 60.0;
    report(4, ok, "reverse derivative vs finite differences",
           fmt("checked=%d passed=%d failed=%d skipped=%d discarded=%d skip+discard rate=%.1f%% in %.1f s",
               r.checked(), r.passed, r.failed, r.skipped, r.discarded, 100 * skip_rate, r.seconds));
    first_failures(r);
  }
  {
    const SuiteReport& r = first.interp;
    double discard_rate = r.seeds ? double(r.discarded) / r.seeds : 1.0;
    bool ok = r.checked() >= 1000 && r.failed == 0 && discard_rate < 0.40;
    report(5, ok, "interpolation and type safety",
           fmt("checked=%d violations=%d fuel-discarded=%d (%.1f%%) in %.1f s", r.checked(), r.failed, r.discarded,
               100 * discard_rate, r.seconds));
    first_failures(r);
  }
  {
    const SuiteReport& r = first.adjoint;
    bool ok = r.checked() >= 300 && r.failed == 0 && r.passed > 0;
    report(6, ok, "adjoint and forward-from-reverse identities",
           fmt("checked=%d passed=%d failed=%d skipped=%d discarded=%d in %.1f s", r.checked(), r.passed, r.failed,
               r.skipped, r.discarded, r.seconds));
    first_failures(r);
  }
  {
    int calls = first.vjp.rdiff_calls + first.interp.rdiff_calls + first.adjoint.rdiff_calls;
    std::size_t errors =
        first.vjp.rdiff_errors.size() + first.interp.rdiff_errors.size() + first.adjoint.rdiff_errors.size();
    report(7, errors == 0 && calls > 0, "typing of differentiated traces",
           fmt("rdiff calls=%d ill-typed=%zu", calls, errors));
    for (const auto* r : {&first.vjp, &first.interp, &first.adjoint}) {
      for (std::size_t k = 0; k < r->rdiff_errors.size() && k < 5; ++k) {
        std::printf("    %s\n", r->rdiff_errors[k].c_str());
      }
    }
  }
  {
    // Same seeds, a different thread count.
    Runs second = run_suites(3);
    bool ok = true;
    std::string detail;
    for (auto [a, b] : {std::pair{&first.vjp, &second.vjp}, std::pair{&first.interp, &second.interp},
                        std::pair{&first.adjoint, &second.adjoint}}) {
      bool same = a->text() == b->text() && a->digest() == b->digest();
      ok = ok && same;
      detail += fmt("%s%s %016llx %s", detail.empty() ? "" : "; ", a->name.c_str(),
                    static_cast<unsigned long long>(a->digest()), same ? "identical" : "DIFFERS");
    }
    report(8, ok, "determinacy of suite reports", detail);
  }
}

}  // namespace

int main() {
  nested_examples();
  relu();
  training();
  suites();
  std::printf("%d of 8 criteria failed\n", failures);
  return failures ? 1 : 0;
}
