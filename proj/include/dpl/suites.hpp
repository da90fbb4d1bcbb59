#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpl/generator.hpp"
#include "dpl/machine.hpp"

namespace dpl {

struct SuiteConfig {
  std::uint64_t first_seed = 0;
  /// Stop once this many cases were checked (discarded cases don't count).
  int count = 1000;
  int depth = 4;
  /// 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
  std::uint64_t fuel = 200'000;
  /// Give up after this many seeds even if `count` was not reached.
  int max_seeds = 100'000;
  GenConfig gen;
};

enum class CaseOutcome { Pass, Fail, Skip, Discard };
const char* to_string(CaseOutcome o);

struct CaseResult {
  CaseOutcome outcome = CaseOutcome::Discard;
  std::string line;
  int rdiff_calls = 0;
  /// rdiff outputs that did not typecheck at the differentiation type.
  std::vector<std::string> rdiff_errors;
};

struct SuiteReport {
  std::string name;
  std::vector<std::string> lines;
  int seeds = 0;
  int passed = 0;
  int failed = 0;
  int skipped = 0;
  int discarded = 0;
  int rdiff_calls = 0;
  std::vector<std::string> rdiff_errors;
  /// Wall time; not part of text().
  double seconds = 0.0;

  int checked() const { return passed + failed + skipped; }
  /// Every case line followed by the counters; deterministic in the config.
  std::string text() const;
  std::uint64_t digest() const;
  std::string summary() const;
};

/// Traces a generated program at a random point and compares
/// the reverse derivative of the trace with finite differences.
CaseResult vjp_case(std::uint64_t seed, int depth, std::uint64_t fuel, const GenConfig& gen = {});
/// Interpolation and type safety of a generated program under a random rho.
CaseResult interpolation_case(std::uint64_t seed, int depth, std::uint64_t fuel, const GenConfig& gen = {});
/// <w, fd(u)> against <rd(w), u>, each also checked by finite differences.
CaseResult adjoint_case(std::uint64_t seed, int depth, std::uint64_t fuel, const GenConfig& gen = {});

/// Calibrated settings. The reverse transform doubles its work at every
/// let of the trace, and the forward side of the adjoint check applies it
/// twice, so the adjoint suite runs on the smallest programs.
SuiteConfig vjp_defaults();
SuiteConfig interpolation_defaults();
SuiteConfig adjoint_defaults();

SuiteReport run_vjp_suite(const SuiteConfig& cfg);
SuiteReport run_interpolation_suite(const SuiteConfig& cfg);
SuiteReport run_adjoint_suite(const SuiteConfig& cfg);

/// Installs an on_rdiff hook that typechecks each output at its type under
/// the types of rho, recording into `result`.
void check_rdiff_typing(Session& s, CaseResult& result);

}  // namespace dpl
