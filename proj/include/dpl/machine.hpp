#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dpl/ast.hpp"
#include "dpl/errors.hpp"
#include "dpl/persistent_map.hpp"
#include "dpl/primitives.hpp"

namespace dpl {

struct Closure;
using ClosurePtr = std::shared_ptr<const Closure>;

/// rho: ordinary variables to closed values.
using ValueEnv = PersistentMap<std::string, Value>;
/// phi: function variables to closures.
using FunEnv = PersistentMap<std::string, ClosurePtr>;

/// <phi, f, x, T, U, M>. The closure does not contain itself; the call
/// rule re-inserts it under its own name.
struct Closure {
  FunEnv env;
  std::string fn;
  std::string param;
  Type param_type;
  Type result_type;
  TermPtr body;
};

/// rho(V): substitutes closed values for the free variables of V.
/// Throws InternalError if a variable is unbound.
Value apply_env_value(const ValueEnv& rho, const Value& v);

// ---- evaluation contexts ------------------------------------------------------

enum class Slot : std::uint8_t {
  AddLeft,
  AddRight,
  PrimArg,
  LetBound,
  PairLeft,
  PairRight,
  FstArg,
  SndArg,
  IfCond,
  PredArg,
  AppArg,
  RdAt,
  RdCotangent,
};

struct ContextFrame {
  Slot slot;
  /// The node the hole sits in; `bool_parent` is used for PredArg only.
  TermPtr parent;
  BoolPtr bool_parent;
};

/// A term with one hole, stored root first.
class EvalContext {
 public:
  bool empty() const { return frames_.empty(); }
  const std::vector<ContextFrame>& frames() const { return frames_; }
  void push(ContextFrame f) { frames_.push_back(std::move(f)); }

  /// E[M]. The hole must be a term hole.
  TermPtr plug(TermPtr m) const;
  /// E[B]. The innermost frame must be IfCond.
  TermPtr plug_bool(BoolPtr b) const;

 private:
  std::vector<ContextFrame> frames_;
};

struct IsValue {
  Value value;
};
/// E[R] with R one of V+W, op(V), let x=V in N, fst(V), snd(V),
/// if true/false then M else N, letrec, f(V), rd(x.N)(V)(W).
struct TermRedex {
  EvalContext context;
  TermPtr redex;
};
/// E[pred(V)], E ending in an if-condition hole.
struct BoolRedex {
  EvalContext context;
  BoolPtr redex;
};
using Decomposition = std::variant<IsValue, TermRedex, BoolRedex>;

/// The unique decomposition of a term, evaluating left to right.
Decomposition decompose(const TermPtr& m);

// ---- sessions ---------------------------------------------------------------

/// One differentiation step performed by the symbolic rd rule.
struct RdiffEvent {
  const ValueEnv& rho;
  const std::string& x;
  const Type& type;
  const TraceTerm& trace;
  const Value& point;
  const Value& cotangent;
  const TraceTerm& result;
};

/// State shared by the evaluations of one run: fresh names, the step
/// budget and optional observers. Single-threaded.
class Session {
 public:
  static constexpr std::uint64_t kDefaultFuel = 1'000'000;

  explicit Session(std::uint64_t fuel = kDefaultFuel, const Registry& reg = Registry::builtin())
      : registry_(reg), fuel_(fuel) {}

  const Registry& registry() const { return registry_; }
  VarSupply& supply() { return supply_; }

  std::uint64_t fuel_left() const { return fuel_; }
  void set_fuel(std::uint64_t fuel) { fuel_ = fuel; }
  /// Spends one unit of fuel; throws FuelExhausted when none is left.
  void tick() {
    if (fuel_ == 0) throw FuelExhausted();
    --fuel_;
  }

  ProbeMonitor* monitor = nullptr;
  std::function<void(const RdiffEvent&)> on_rdiff;

 private:
  const Registry& registry_;
  VarSupply supply_;
  std::uint64_t fuel_;
};

/// phi, rho |- M => V
Value eval(Session& s, const FunEnv& phi, const ValueEnv& rho, const TermPtr& m);
/// phi, rho |- B => true/false
bool eval_bool(Session& s, const FunEnv& phi, const ValueEnv& rho, const BoolPtr& b);
/// phi, rho |- M =>s C
TraceTerm sym_eval(Session& s, const FunEnv& phi, const ValueEnv& rho, const TermPtr& m);

}  // namespace dpl
