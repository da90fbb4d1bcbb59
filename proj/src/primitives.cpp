#include "dpl/primitives.hpp"

#include <cmath>
#include <stdexcept>

#include "dpl/errors.hpp"

namespace dpl {

namespace {

using Jets = std::vector<Jet>;

JetFn unary(Jet (*f)(const Jet&)) {
  return [f](std::span<const Jet> x) { return Jets{f(x[0])}; };
}

JetFn dprod(std::size_t n) {
  return [n](std::span<const Jet> x) {
    Jet acc = x[0] * x[n];
    for (std::size_t i = 1; i < n; ++i) acc = acc + x[i] * x[n + i];
    return Jets{acc};
  };
}

// c * <v, u> for DProd_n at <<u>, <v>> with cotangent c.
JetFn dprod_r(std::size_t n) {
  return [n](std::span<const Jet> x) {
    const Jet& c = x[2 * n];
    Jets out;
    out.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(c * x[n + i]);
    for (std::size_t i = 0; i < n; ++i) out.push_back(c * x[i]);
    return out;
  };
}

MarginFn at_index(std::size_t i) {
  return [i](std::span<const double> x) { return std::fabs(x[i]); };
}

}  // namespace

Registry::Registry() {
  const Type real = Type::real();
  const Type real2 = Type::real_power(2);

  auto with_reverse = [this](PrimOp op, JetFn reverse) {
    PrimOp r;
    r.name = op.reverse_name();
    r.arg = Type::prod(op.arg, op.result);
    r.result = op.arg;
    r.fn = std::move(reverse);
    r.margin = op.margin;
    r.margin_inputs = op.margin_inputs;
    base_order_.push_back(op.name);
    add(std::move(op));
    add(std::move(r));
  };

  with_reverse({"neg", real, real, unary([](const Jet& a) { return -a; }), {}, 0},
               [](std::span<const Jet> x) { return Jets{-x[1]}; });

  with_reverse({"mul", real2, real, [](std::span<const Jet> x) { return Jets{x[0] * x[1]}; }, {}, 0},
               [](std::span<const Jet> x) { return Jets{x[2] * x[1], x[2] * x[0]}; });

  with_reverse({"div", real2, real, [](std::span<const Jet> x) { return Jets{x[0] / x[1]}; }, at_index(1), 2},
               [](std::span<const Jet> x) {
                 const Jet& a = x[0];
                 const Jet& b = x[1];
                 const Jet& w = x[2];
                 return Jets{w / b, -(w * a) / (b * b)};
               });

  with_reverse({"exp", real, real, unary([](const Jet& a) { return exp(a); }), {}, 0},
               [](std::span<const Jet> x) { return Jets{x[1] * exp(x[0])}; });

  // log is defined on x > 0, so its margin is signed.
  with_reverse({"log", real, real, unary([](const Jet& a) { return log(a); }),
                [](std::span<const double> x) { return x[0]; }, 1},
               [](std::span<const Jet> x) { return Jets{x[1] / x[0]}; });

  with_reverse({"sin", real, real, unary([](const Jet& a) { return sin(a); }), {}, 0},
               [](std::span<const Jet> x) { return Jets{x[1] * cos(x[0])}; });

  with_reverse({"cos", real, real, unary([](const Jet& a) { return cos(a); }), {}, 0},
               [](std::span<const Jet> x) { return Jets{-(x[1] * sin(x[0]))}; });

  for (std::size_t n = 1; n <= 8; ++n) {
    Type v = Type::real_power(n);
    with_reverse({"DProd" + std::to_string(n), Type::prod(v, v), real, dprod(n), {}, 0}, dprod_r(n));
  }

  preds_.emplace("lt", PrimPred{"lt", "<.", real2, -1});
  preds_.emplace("gt", PrimPred{"gt", ">.", real2, +1});
}

void Registry::add(PrimOp op) {
  std::string name = op.name;
  ops_.emplace(std::move(name), std::make_unique<PrimOp>(std::move(op)));
}

const Registry& Registry::builtin() {
  static const Registry reg;
  return reg;
}

const PrimOp* Registry::op(std::string_view name) const {
  std::lock_guard lock(mutex_);
  // Find the longest registered prefix, then build the missing reverses.
  std::string_view base = name;
  std::size_t missing = 0;
  auto it = ops_.find(base);
  while (it == ops_.end()) {
    if (!base.ends_with("_r")) return nullptr;
    base.remove_suffix(2);
    ++missing;
    it = ops_.find(base);
  }
  const PrimOp* cur = it->second.get();
  for (; missing > 0; --missing) {
    auto r = std::make_unique<PrimOp>();
    r->name = cur->reverse_name();
    r->arg = Type::prod(cur->arg, cur->result);
    r->result = cur->arg;
    r->fn = reverse_of(cur->fn, cur->arg.size(), cur->result.size());
    r->margin = cur->margin;
    r->margin_inputs = cur->margin_inputs;
    const PrimOp* raw = r.get();
    ops_.emplace(r->name, std::move(r));
    cur = raw;
  }
  return cur;
}

const PrimPred* Registry::pred(std::string_view name) const {
  auto it = preds_.find(name);
  return it == preds_.end() ? nullptr : &it->second;
}

std::vector<std::string> Registry::base_ops() const { return base_order_; }

std::vector<std::string> Registry::preds() const {
  std::vector<std::string> out;
  for (const auto& [name, p] : preds_) out.push_back(name);
  return out;
}

void flatten_into(const Value& v, std::vector<double>& out) {
  if (v.is_real()) {
    out.push_back(v.as_real());
  } else if (v.is_pair()) {
    flatten_into(v.first(), out);
    flatten_into(v.second(), out);
  } else if (v.is_var()) {
    throw InternalError("flatten of open value (variable " + v.var_name() + ")");
  }
}

std::vector<double> flatten(const Value& v) {
  std::vector<double> out;
  flatten_into(v, out);
  return out;
}

namespace {

Value unflatten_at(const Type& t, std::span<const double> leaves, std::size_t& pos) {
  switch (t.kind()) {
    case Type::Kind::Real:
      return Value::real(leaves[pos++]);
    case Type::Kind::Unit:
      return Value::unit();
    case Type::Kind::Prod: {
      Value l = unflatten_at(t.left(), leaves, pos);
      Value r = unflatten_at(t.right(), leaves, pos);
      return Value::pair(l, r, ProdTypes{t.left(), t.right()});
    }
  }
  return Value::unit();
}

}  // namespace

Value unflatten(const Type& t, std::span<const double> leaves) {
  if (leaves.size() < t.size()) throw std::invalid_argument("unflatten: too few leaves for " + t.str());
  std::size_t pos = 0;
  return unflatten_at(t, leaves, pos);
}

std::optional<Value> prim_eval(const Registry& reg, std::string_view name, const Value& v,
                               ProbeMonitor* monitor) {
  const PrimOp* op = reg.op(name);
  if (!op) throw std::invalid_argument("unknown operation '" + std::string(name) + "'");
  std::vector<double> leaves = flatten(v);
  if (leaves.size() != op->arg.size()) throw InternalError("arity violation for " + op->name);
  if (op->margin) {
    double m = op->margin(std::span<const double>(leaves).first(op->margin_inputs));
    if (monitor) monitor->margin(op->name, m);
    if (!(m > 0.0)) return std::nullopt;
  }
  std::vector<Jet> in(leaves.begin(), leaves.end());
  std::vector<Jet> out = op->fn(in);
  std::vector<double> res;
  res.reserve(out.size());
  for (const auto& j : out) res.push_back(j.value());
  return unflatten(op->result, res);
}

std::optional<Value> prim_reverse_eval(const Registry& reg, std::string_view op, const Value& v,
                                       const Value& w, ProbeMonitor* monitor) {
  return prim_eval(reg, std::string(op) + "_r", Value::pair(v, w), monitor);
}

std::optional<bool> prim_bool_eval(const Registry& reg, std::string_view name, const Value& v,
                                   ProbeMonitor* monitor) {
  const PrimPred* p = reg.pred(name);
  if (!p) throw std::invalid_argument("unknown predicate '" + std::string(name) + "'");
  std::vector<double> leaves = flatten(v);
  if (leaves.size() != 2) throw InternalError("arity violation for " + p->name);
  double a = leaves[0];
  double b = leaves[1];
  if (monitor) monitor->margin(p->name, std::fabs(a - b));
  if (a < b) return p->sign < 0;
  if (a > b) return p->sign > 0;
  return std::nullopt;
}

}  // namespace dpl
