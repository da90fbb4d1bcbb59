#include "dpl/symdiff.hpp"

#include "dpl/elaborate.hpp"
#include "dpl/errors.hpp"

namespace dpl {

namespace {

TraceTerm trace_of(const TermPtr& t) {
  auto out = TraceTerm::from_term(t);
  if (!out) throw InternalError("rdiff: input is not a trace term");
  return *out;
}

const ProdTypes& decorations(const std::optional<ProdTypes>& d, const char* what) {
  if (!d) throw InternalError(std::string("rdiff: undecorated ") + what);
  return *d;
}

class Rdiff {
 public:
  Rdiff(VarSupply& supply, const std::function<void()>& tick, const Registry& reg)
      : supply_(supply), tick_(tick), reg_(reg) {}

  TraceTerm run(const std::string& x, const Type& t, const TraceTerm& c, const Value& v, const Value& w) {
    if (tick_) tick_();
    const TermPtr& ct = c.term();

    if (const auto* n = ct->as<node::Var>()) {
      return n->name == x ? TraceTerm::from_value(w) : zero(t);
    }
    if (ct->as<node::Const>() || ct->as<node::UnitVal>()) return zero(t);

    if (const auto* n = ct->as<node::Add>()) {
      return add_at_type(t, run(x, t, trace_of(n->lhs), v, w), run(x, t, trace_of(n->rhs), v, w), supply_);
    }

    if (const auto* n = ct->as<node::PrimApp>()) {
      const PrimOp* op = reg_.op(n->op);
      if (!op) throw InternalError("rdiff: unknown operation " + n->op);
      // let x:T = V in let y:S = W.op_r(D) in rdiff(x, D, V, y)
      std::string y = supply_.fresh();
      TraceTerm d = trace_of(n->arg);
      TraceTerm cot = TraceTerm::prim(op->reverse_name(),
                                      TraceTerm::pair(d, TraceTerm::from_value(w), ProdTypes{op->arg, op->result}));
      TraceTerm inner = TraceTerm::let(y, op->arg, cot, run(x, t, d, v, Value::var(y)));
      return rebind(x, t, v, inner);
    }

    if (const auto* n = ct->as<node::Let>()) {
      std::string y = n->var;
      TraceTerm d = trace_of(n->bound);
      TraceTerm e = trace_of(n->body);
      if (needs_rename(y, x, v, w, d)) {
        std::string fresh = supply_.fresh();
        e = trace_of(rename_free(e.term(), y, fresh));
        y = fresh;
      }
      const Type& s = n->type;
      std::string ybar = supply_.fresh();
      TraceTerm through_e = run(x, t, e, v, w);
      TraceTerm through_d = TraceTerm::let(ybar, s, run(y, s, e, Value::var(y), w), run(x, t, d, v, Value::var(ybar)));
      TraceTerm sum = add_at_type(t, through_e, through_d, supply_);
      return rebind(x, t, v, TraceTerm::let(y, s, d, sum));
    }

    if (const auto* n = ct->as<node::Pair>()) {
      const ProdTypes& ty = decorations(n->types, "pair");
      std::string y = supply_.fresh();
      std::string z = supply_.fresh();
      TraceTerm sum = add_at_type(t, run(x, t, trace_of(n->first), v, Value::var(y)),
                                  run(x, t, trace_of(n->second), v, Value::var(z)), supply_);
      return elab_tuple_let({{y, ty.left}, {z, ty.right}}, TraceTerm::from_value(w), sum, supply_);
    }

    if (const auto* n = ct->as<node::Fst>()) {
      const ProdTypes& ty = decorations(n->types, "fst");
      Value cot = Value::pair(w, zero_of_type(ty.right), ty);
      return projection(x, t, v, trace_of(n->arg), ty, cot);
    }
    if (const auto* n = ct->as<node::Snd>()) {
      const ProdTypes& ty = decorations(n->types, "snd");
      Value cot = Value::pair(zero_of_type(ty.left), w, ty);
      return projection(x, t, v, trace_of(n->arg), ty, cot);
    }

    throw InternalError("rdiff: unexpected node");
  }

 private:
  TraceTerm zero(const Type& t) { return TraceTerm::from_value(zero_of_type(t)); }

  TraceTerm rebind(const std::string& x, const Type& t, const Value& v, const TraceTerm& body) {
    return TraceTerm::let(x, t, TraceTerm::from_value(v), body);
  }

  // let x:T = V in let y:U*S = D in rdiff(x, D, V, cot); the unused y
  // keeps D's evaluation, and so its definedness, in the output.
  TraceTerm projection(const std::string& x, const Type& t, const Value& v, const TraceTerm& d,
                       const ProdTypes& ty, const Value& cot) {
    std::string y = supply_.fresh();
    TraceTerm inner = TraceTerm::let(y, Type::prod(ty.left, ty.right), d, run(x, t, d, v, cot));
    return rebind(x, t, v, inner);
  }

  static bool needs_rename(const std::string& y, const std::string& x, const Value& v, const Value& w,
                           const TraceTerm& d) {
    if (y == x) return true;
    if (free_vars(v.term()).vars.contains(y)) return true;
    if (free_vars(w.term()).vars.contains(y)) return true;
    return free_vars(d.term()).vars.contains(y);
  }

  VarSupply& supply_;
  const std::function<void()>& tick_;
  const Registry& reg_;
};

}  // namespace

TraceTerm rdiff(const std::string& x, const Type& t, const TraceTerm& c, const Value& v, const Value& w,
                VarSupply& supply, const std::function<void()>& tick, const Registry& reg) {
  if (free_vars(w.term()).vars.contains(x)) throw InternalError("rdiff: " + x + " occurs in the cotangent");
  if (!(v.is_var() && v.var_name() == x) && free_vars(v.term()).vars.contains(x)) {
    throw InternalError("rdiff: " + x + " occurs in the point");
  }
  supply.avoid_all(c.term());
  supply.avoid_all(v.term());
  supply.avoid_all(w.term());
  return Rdiff(supply, tick, reg).run(x, t, c, v, w);
}

}  // namespace dpl
