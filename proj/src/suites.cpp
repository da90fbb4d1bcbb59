#include "dpl/suites.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <random>
#include <thread>

#include "dpl/generator.hpp"
#include "dpl/oracle.hpp"
#include "dpl/printer.hpp"
#include "dpl/typecheck.hpp"

namespace dpl {

const char* to_string(CaseOutcome o) {
  switch (o) {
    case CaseOutcome::Pass:
      return "PASS";
    case CaseOutcome::Fail:
      return "FAIL";
    case CaseOutcome::Skip:
      return "SKIP";
    case CaseOutcome::Discard:
      return "DISCARD";
  }
  return "?";
}

std::string SuiteReport::text() const {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  out += summary();
  out += '\n';
  for (const auto& e : rdiff_errors) {
    out += "rdiff-typing: " + e + '\n';
  }
  return out;
}

std::uint64_t SuiteReport::digest() const {
  // FNV-1a
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string SuiteReport::summary() const {
  return name + ": seeds=" + std::to_string(seeds) + " checked=" + std::to_string(checked()) +
         " pass=" + std::to_string(passed) + " fail=" + std::to_string(failed) + " skip=" + std::to_string(skipped) +
         " discard=" + std::to_string(discarded) + " rdiff=" + std::to_string(rdiff_calls) +
         " rdiff-ill-typed=" + std::to_string(rdiff_errors.size());
}

void check_rdiff_typing(Session& s, CaseResult& result) {
  s.on_rdiff = [&result, &s](const RdiffEvent& e) {
    ++result.rdiff_calls;
    TypeEnv gamma;
    try {
      e.rho.for_each([&](const std::string& y, const Value& v) { gamma = gamma.insert(y, type_of_closed_value(v)); });
      Typed t = infer_term({}, gamma, e.result.term(), s.registry());
      if (!(t.type == e.type)) {
        result.rdiff_errors.push_back("rdiff wrt " + e.x + " has type " + t.type.str() + ", expected " +
                                      e.type.str());
      }
    } catch (const TypeError& err) {
      result.rdiff_errors.push_back("rdiff wrt " + e.x + ": " + err.what());
    }
  };
}

namespace {

constexpr std::uint64_t kVjpSalt = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kInterpSalt = 0xbf58476d1ce4e5b9ULL;
constexpr std::uint64_t kAdjointSalt = 0x94d049bb133111ebULL;

/// A type with at least one real leaf.
Type gen_input_type(std::mt19937_64& rng) {
  for (;;) {
    Type t = gen_type(rng, 3);
    if (t.size() > 0) return t;
  }
}

struct Setup {
  Type t;
  Type u;
  TermPtr program;
  Value point;
};

/// x : T |- M : U, typechecked, plus a point of T.
std::optional<Setup> make_setup(std::uint64_t seed, std::uint64_t salt, int depth, const GenConfig& gen,
                                CaseResult& r, const std::string& name) {
  std::mt19937_64 rng(seed ^ salt);
  Type t = gen_input_type(rng);
  Type u = gen_type(rng, 3);
  TermPtr m = gen_program(seed ^ salt, TypeEnv{}.insert("x", t), u, depth, gen);
  try {
    Typed typed = infer_term({}, TypeEnv{}.insert("x", t), m);
    if (!(typed.type == u)) throw TypeError(TypeError::Kind::TypeMismatch, "generated program has type " + typed.type.str());
    m = typed.term;
  } catch (const TypeError& e) {
    r.outcome = CaseOutcome::Fail;
    r.line = name + " note=\"generator produced an ill-typed program: " + e.what() + "\"";
    return std::nullopt;
  }
  Value v = gen_value(rng, t);
  return Setup{t, u, m, v};
}

CaseOutcome from_verdict(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return CaseOutcome::Pass;
    case Verdict::Fail:
      return CaseOutcome::Fail;
    case Verdict::Skip:
      return CaseOutcome::Skip;
  }
  return CaseOutcome::Fail;
}

std::string seed_name(const char* prefix, std::uint64_t seed) { return std::string(prefix) + "#" + std::to_string(seed); }

}  // namespace

CaseResult vjp_case(std::uint64_t seed, int depth, std::uint64_t fuel, const GenConfig& gen) {
  CaseResult r;
  std::string name = seed_name("vjp", seed);
  auto setup = make_setup(seed, kVjpSalt, depth, gen, r, name);
  if (!setup) return r;
  std::mt19937_64 rng(seed ^ kVjpSalt ^ 1);
  Value w = gen_value(rng, setup->u);

  Session s(fuel);
  check_rdiff_typing(s, r);
  std::optional<TraceTerm> c;
  try {
    c = sym_eval(s, {}, ValueEnv{}.insert("x", setup->point), setup->program);
  } catch (const Stuck& e) {
    r.line = name + " note=\"trace undefined: " + e.what() + "\"";
    return r;
  } catch (const FuelExhausted&) {
    r.line = name + " note=\"fuel exhausted while tracing\"";
    return r;
  }
  s.set_fuel(fuel);
  OracleOptions opt;
  opt.probe_fuel = fuel;
  FDReport rep = check_vjp(s, name, "x", setup->t, *c, setup->point, w, opt);
  r.outcome = from_verdict(rep.verdict);
  // The transform's output is exponential in the trace's let-nesting; a
  // trace too large to differentiate within the budget is not a test case.
  if (rep.verdict == Verdict::Skip && rep.note.starts_with("fuel exhausted")) r.outcome = CaseOutcome::Discard;
  r.line = rep.line();
  return r;
}

CaseResult interpolation_case(std::uint64_t seed, int depth, std::uint64_t fuel, const GenConfig& gen) {
  CaseResult r;
  std::string name = seed_name("interp", seed);
  auto setup = make_setup(seed, kInterpSalt, depth, gen, r, name);
  if (!setup) return r;
  ValueEnv rho = ValueEnv{}.insert("x", setup->point);
  TypeEnv gamma = TypeEnv{}.insert("x", setup->t);

  InterpolationResult ir =
      check_interpolation({}, rho, setup->program, fuel, [&r](Session& s) { check_rdiff_typing(s, r); });
  switch (ir.verdict) {
    case Interpolation::Inconclusive:
      r.outcome = CaseOutcome::Discard;
      r.line = name + " note=\"" + ir.detail + "\"";
      return r;
    case Interpolation::Violated:
      r.outcome = CaseOutcome::Fail;
      r.line = name + " note=\"interpolation: " + ir.detail + "\"";
      return r;
    case Interpolation::Holds:
      break;
  }

  // Type safety: the value and the trace both have the program's type.
  std::string problem;
  if (ir.value) {
    Type vt = type_of_closed_value(*ir.value);
    if (!(vt == setup->u)) problem = "value has type " + vt.str() + ", expected " + setup->u.str();
  }
  if (problem.empty() && ir.trace) {
    try {
      Typed ct = infer_term({}, gamma, ir.trace->term());
      if (!(ct.type == setup->u)) problem = "trace has type " + ct.type.str() + ", expected " + setup->u.str();
    } catch (const TypeError& e) {
      problem = std::string("trace ill-typed: ") + e.what();
    }
  }
  if (!problem.empty()) {
    r.outcome = CaseOutcome::Fail;
    r.line = name + " note=\"" + problem + "\"";
    return r;
  }
  r.outcome = CaseOutcome::Pass;
  r.line = name + " result=" + (ir.value ? print_value(*ir.value) : std::string("undefined"));
  return r;
}

CaseResult adjoint_case(std::uint64_t seed, int depth, std::uint64_t fuel, const GenConfig& gen) {
  CaseResult r;
  std::string name = seed_name("adjoint", seed);
  auto setup = make_setup(seed, kAdjointSalt, depth, gen, r, name);
  if (!setup) return r;
  std::mt19937_64 rng(seed ^ kAdjointSalt ^ 1);
  Value u = gen_value(rng, setup->t);
  Value w = gen_value(rng, setup->u);

  Session s(fuel);
  check_rdiff_typing(s, r);
  OracleOptions opt;
  opt.probe_fuel = fuel;
  FDReport rep = check_adjoint_identity(s, name, "x", setup->t, setup->program, setup->u, setup->point, u, w, opt);
  r.outcome = from_verdict(rep.verdict);
  // A program undefined at its own base point is not a test of the identity,
  // nor is one whose derivative does not fit in the budget.
  if (rep.verdict == Verdict::Skip && (rep.note.starts_with("outside domain") || rep.note.starts_with("fuel exhausted"))) {
    r.outcome = CaseOutcome::Discard;
  }
  r.line = rep.line();
  return r;
}

namespace {

using CaseFn = CaseResult (*)(std::uint64_t, int, std::uint64_t, const GenConfig&);

SuiteReport run_suite(const char* name, CaseFn fn, const SuiteConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  SuiteReport rep;
  rep.name = name;
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  const int batch = static_cast<int>(std::max(64u, threads * 16u));

  int next = 0;
  while (rep.checked() < cfg.count && next < cfg.max_seeds) {
    int n = std::min(batch, cfg.max_seeds - next);
    std::vector<CaseResult> results(static_cast<std::size_t>(n));
    std::atomic<int> cursor{0};
    auto worker = [&] {
      for (int i = cursor++; i < n; i = cursor++) {
        results[static_cast<std::size_t>(i)] = fn(cfg.first_seed + static_cast<std::uint64_t>(next + i), cfg.depth, cfg.fuel, cfg.gen);
      }
    };
    {
      std::vector<std::jthread> pool;
      for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
      worker();
    }
    // Fold in seed order and stop exactly at the count, so the report does
    // not depend on the batch size or thread count.
    for (int i = 0; i < n; ++i) {
      CaseResult& res = results[static_cast<std::size_t>(i)];
      if (rep.checked() >= cfg.count) break;
      ++rep.seeds;
      switch (res.outcome) {
        case CaseOutcome::Pass:
          ++rep.passed;
          break;
        case CaseOutcome::Fail:
          ++rep.failed;
          break;
        case CaseOutcome::Skip:
          ++rep.skipped;
          break;
        case CaseOutcome::Discard:
          ++rep.discarded;
          break;
      }
      rep.rdiff_calls += res.rdiff_calls;
      for (auto& e : res.rdiff_errors) {
        rep.rdiff_errors.push_back(rep.name + "#" + std::to_string(cfg.first_seed + static_cast<std::uint64_t>(next + i)) +
                                   ": " + e);
      }
      rep.lines.push_back(std::string(to_string(res.outcome)) + " " + res.line);
    }
    next += n;
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace

SuiteConfig vjp_defaults() {
  SuiteConfig c;
  c.count = 1000;
  c.depth = 3;
  c.fuel = 50'000;
  return c;
}

SuiteConfig interpolation_defaults() {
  SuiteConfig c;
  c.count = 1000;
  c.depth = 6;
  c.fuel = 200'000;
  return c;
}

SuiteConfig adjoint_defaults() {
  SuiteConfig c;
  c.count = 300;
  c.depth = 2;
  c.fuel = 20'000;
  c.gen.max_rd_nesting = 1;
  return c;
}

SuiteReport run_vjp_suite(const SuiteConfig& cfg) { return run_suite("vjp", &vjp_case, cfg); }
SuiteReport run_interpolation_suite(const SuiteConfig& cfg) {
  return run_suite("interpolation", &interpolation_case, cfg);
}
SuiteReport run_adjoint_suite(const SuiteConfig& cfg) { return run_suite("adjoint", &adjoint_case, cfg); }

}  // namespace dpl
