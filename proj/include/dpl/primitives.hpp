#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpl/ast.hpp"
#include "dpl/jet.hpp"

namespace dpl {

/// Distance from an argument to the edge of a primitive's domain, measured
/// on the quantity the domain test looks at (the denominator for div, the
/// argument for log, a-b for the dotted comparisons). The primitive is
/// defined exactly where the margin is > 0.
using MarginFn = std::function<double(std::span<const double>)>;

struct PrimOp {
  std::string name;
  Type arg;
  Type result;
  JetFn fn;
  /// Empty for total operations.
  MarginFn margin;
  /// Number of leading inputs the margin looks at (the base op's arity).
  std::size_t margin_inputs = 0;
  std::string reverse_name() const { return name + "_r"; }
};

struct PrimPred {
  std::string name;
  /// Surface spelling used in diagnostics, e.g. "<.".
  std::string display;
  Type arg;
  /// Sign of a-b that makes the predicate true.
  int sign;
};

/// Observes every primitive application made during an evaluation.
class ProbeMonitor {
 public:
  virtual ~ProbeMonitor() = default;
  virtual void margin(const std::string& primitive, double m) = 0;
  /// Called by the machine for every guard it decides.
  virtual void branch(const std::string& /*pred*/, bool /*outcome*/) {}
};

class Registry {
 public:
  /// Shipped set: neg, mul, div, exp, log, sin, cos, DProd1..DProd8 and
  /// the dotted comparisons lt (<.) and gt (>.). Any name made of a base
  /// op followed by one or more "_r" suffixes resolves to the corresponding
  /// reverse derivative.
  static const Registry& builtin();

  const PrimOp* op(std::string_view name) const;
  const PrimPred* pred(std::string_view name) const;

  /// Base operation names in registration order.
  std::vector<std::string> base_ops() const;
  std::vector<std::string> preds() const;

 private:
  Registry();
  void add(PrimOp op);

  std::vector<std::string> base_order_;
  std::map<std::string, PrimPred, std::less<>> preds_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::unique_ptr<PrimOp>, std::less<>> ops_;
};

std::vector<double> flatten(const Value& v);
void flatten_into(const Value& v, std::vector<double>& out);
/// Rebuilds a closed value of type `t` from its leaves; consumes exactly t.size() entries.
Value unflatten(const Type& t, std::span<const double> leaves);

/// ev(op, V). Throws std::invalid_argument for an unknown op.
std::optional<Value> prim_eval(const Registry& reg, std::string_view op, const Value& v,
                               ProbeMonitor* monitor = nullptr);
/// ev(op_r, <V, W>).
std::optional<Value> prim_reverse_eval(const Registry& reg, std::string_view op, const Value& v,
                                       const Value& w, ProbeMonitor* monitor = nullptr);
/// bev(pred, V). Undefined exactly when the two reals are equal.
std::optional<bool> prim_bool_eval(const Registry& reg, std::string_view pred, const Value& v,
                                   ProbeMonitor* monitor = nullptr);

}  // namespace dpl
