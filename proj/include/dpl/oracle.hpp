#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dpl/machine.hpp"

namespace dpl {

/// Flat real function R^n -> R^m; nullopt where undefined.
using RealFn = std::function<std::optional<std::vector<double>>(std::span<const double>)>;
/// Row-major, m rows of n entries.
using Matrix = std::vector<std::vector<double>>;

struct Tolerance {
  double rel = 1e-4;
  double abs_floor = 1e-7;
};

/// |a - n| / max(|a|, |n|, floor/rel); a check passes when this is <= rel.
double rel_error(double analytic, double numeric, const Tolerance& tol = {});
double max_rel_error(std::span<const double> analytic, std::span<const double> numeric, const Tolerance& tol = {});

/// Central differences with h_j = h_scale * max(1, |x_j|). nullopt if any
/// probe is undefined. With n = 0 the result has m empty rows.
std::optional<Matrix> fd_jacobian(const RealFn& f, std::span<const double> x, double h_scale = 1e-5);

/// x |-> flatten(eval M under rho[x := unflatten(T, x)]). Each call runs in a
/// fresh session with the given fuel; Stuck and FuelExhausted map to nullopt.
RealFn term_function(const FunEnv& phi, const ValueEnv& rho, const std::string& x, const Type& t, TermPtr m,
                     std::uint64_t fuel = Session::kDefaultFuel);

/// Records the smallest domain margin seen and the branch decisions taken.
class MarginMonitor : public ProbeMonitor {
 public:
  void margin(const std::string&, double m) override {
    if (!(m >= min_margin_)) min_margin_ = m;
  }
  void branch(const std::string& pred, bool outcome) override { branches_.emplace_back(pred, outcome); }
  double min_margin() const { return min_margin_; }
  const std::vector<std::pair<std::string, bool>>& branches() const { return branches_; }

 private:
  double min_margin_ = std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::string, bool>> branches_;
};

enum class Verdict { Pass, Fail, Skip };
const char* to_string(Verdict v);

struct FDReport {
  std::string name;
  std::vector<double> point;
  std::vector<double> analytic;
  std::vector<double> numeric;
  double max_rel_error = 0.0;
  double tolerance = 1e-4;
  Verdict verdict = Verdict::Skip;
  /// Why a check was skipped or failed; empty on a pass.
  std::string note;

  /// One line: name, point, analytic, numeric, maxRelError, verdict.
  std::string line() const;
};

struct OracleOptions {
  double h_scale = 1e-5;
  Tolerance tol;
  /// A point whose smallest domain margin is below boundary_factor * h is
  /// probe-unsafe.
  double boundary_factor = 10.0;
  std::uint64_t probe_fuel = 200'000;
};

/// eval(rdiff(x, T, C, v, w)) against J^T w by central differences. C's
/// free variables must be among x; v and w closed. The rdiff call reports
/// to s.on_rdiff like the machine does.
FDReport check_vjp(Session& s, const std::string& name, const std::string& x, const Type& t, const TraceTerm& c,
                   const Value& v, const Value& w, const OracleOptions& opt = {});

/// For f = x:T |-> N : U at `point`: compares the forward derivative from
/// the fd sugar with J u, the reverse derivative from rd with J^T w, and
/// <w, fd(u)> with <rd(w), u>. N is closed apart from x and decorated.
FDReport check_adjoint_identity(Session& s, const std::string& name, const std::string& x, const Type& t,
                                const TermPtr& body, const Type& u_type, const Value& point, const Value& u,
                                const Value& w, const OracleOptions& opt = {});

enum class Interpolation { Holds, Violated, Inconclusive };

struct InterpolationResult {
  Interpolation verdict;
  std::string detail;
  /// Set when both paths produced a value.
  std::optional<Value> value;
  std::optional<TraceTerm> trace;
};

/// eval(M) = V  iff  sym_eval(M) = C and eval(C) = V, values compared bit
/// for bit. FuelExhausted on either side gives Inconclusive.
InterpolationResult check_interpolation(const FunEnv& phi, const ValueEnv& rho, const TermPtr& m,
                                        std::uint64_t fuel = Session::kDefaultFuel,
                                        const std::function<void(Session&)>& setup = {});

enum class Locality { Holds, Violated, Inconclusive };

struct LocalityResult {
  Locality verdict;
  int compared = 0;
  std::string detail;
};

/// Traces M at rho, then perturbs every real in rho by at most `radius` and
/// checks that M and the trace agree (relative 1e-9) wherever both are
/// defined and the same branches were taken.
LocalityResult check_locality(const FunEnv& phi, const ValueEnv& rho, const TermPtr& m, std::mt19937_64& rng,
                              int samples = 8, double radius = 1e-6, std::uint64_t fuel = Session::kDefaultFuel);

}  // namespace dpl
