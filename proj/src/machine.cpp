#include "dpl/machine.hpp"

#include <optional>

#include "dpl/symdiff.hpp"
#include "dpl/typecheck.hpp"

namespace dpl {

Value apply_env_value(const ValueEnv& rho, const Value& v) {
  if (v.closed()) return v;
  if (v.is_var()) {
    const Value* bound = rho.find(v.var_name());
    if (!bound) throw InternalError("unbound variable '" + v.var_name() + "'");
    return *bound;
  }
  if (v.is_pair()) {
    const auto* p = v.term()->as<node::Pair>();
    return Value::pair(apply_env_value(rho, v.first()), apply_env_value(rho, v.second()), p->types);
  }
  return v;
}

// ---- contexts -----------------------------------------------------------------

namespace {

TermPtr rebuild(const ContextFrame& f, TermPtr hole, BoolPtr bool_hole) {
  const Term& p = *f.parent;
  Span sp = p.span;
  switch (f.slot) {
    case Slot::AddLeft:
      return mk::add(hole, p.as<node::Add>()->rhs, sp);
    case Slot::AddRight:
      return mk::add(p.as<node::Add>()->lhs, hole, sp);
    case Slot::PrimArg:
      return mk::prim(p.as<node::PrimApp>()->op, hole, sp);
    case Slot::LetBound: {
      const auto* n = p.as<node::Let>();
      return mk::let(n->var, n->type, hole, n->body, sp);
    }
    case Slot::PairLeft: {
      const auto* n = p.as<node::Pair>();
      return mk::pair(hole, n->second, n->types, sp);
    }
    case Slot::PairRight: {
      const auto* n = p.as<node::Pair>();
      return mk::pair(n->first, hole, n->types, sp);
    }
    case Slot::FstArg:
      return mk::fst(hole, p.as<node::Fst>()->types, sp);
    case Slot::SndArg:
      return mk::snd(hole, p.as<node::Snd>()->types, sp);
    case Slot::IfCond: {
      const auto* n = p.as<node::If>();
      return mk::cond(bool_hole, n->then_branch, n->else_branch, sp);
    }
    case Slot::AppArg:
      return mk::app(p.as<node::FunApp>()->fn, hole, sp);
    case Slot::RdAt: {
      const auto* n = p.as<node::Rd>();
      return mk::rd(n->var, n->type, n->body, hole, n->cotangent, sp);
    }
    case Slot::RdCotangent: {
      const auto* n = p.as<node::Rd>();
      return mk::rd(n->var, n->type, n->body, n->at, hole, sp);
    }
    case Slot::PredArg:
      break;
  }
  throw InternalError("context: bad frame");
}

TermPtr plug_from(const std::vector<ContextFrame>& frames, TermPtr hole, BoolPtr bool_hole) {
  for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
    if (it->slot == Slot::PredArg) {
      const auto* p = it->bool_parent->as<node::PredApp>();
      bool_hole = mk::pred(p->pred, hole, it->bool_parent->span);
      hole = nullptr;
    } else {
      hole = rebuild(*it, hole, bool_hole);
      bool_hole = nullptr;
    }
  }
  return hole;
}

}  // namespace

TermPtr EvalContext::plug(TermPtr m) const { return plug_from(frames_, std::move(m), nullptr); }

TermPtr EvalContext::plug_bool(BoolPtr b) const {
  if (frames_.empty() || frames_.back().slot != Slot::IfCond) throw InternalError("plug_bool: not a boolean hole");
  return plug_from(frames_, nullptr, std::move(b));
}

Decomposition decompose(const TermPtr& m) {
  if (m->is_value) return IsValue{*Value::from_term(m)};
  EvalContext ctx;
  TermPtr cur = m;
  for (;;) {
    auto descend = [&](Slot slot, const TermPtr& child) {
      ctx.push({slot, cur, nullptr});
      cur = child;
    };
    const Term& t = *cur;
    if (const auto* n = t.as<node::Add>()) {
      if (!n->lhs->is_value) {
        descend(Slot::AddLeft, n->lhs);
      } else if (!n->rhs->is_value) {
        descend(Slot::AddRight, n->rhs);
      } else {
        break;
      }
    } else if (const auto* n = t.as<node::PrimApp>()) {
      if (n->arg->is_value) break;
      descend(Slot::PrimArg, n->arg);
    } else if (const auto* n = t.as<node::Let>()) {
      if (n->bound->is_value) break;
      descend(Slot::LetBound, n->bound);
    } else if (const auto* n = t.as<node::Pair>()) {
      // A pair reached here is not a value, so one side is not.
      if (!n->first->is_value) {
        descend(Slot::PairLeft, n->first);
      } else {
        descend(Slot::PairRight, n->second);
      }
    } else if (const auto* n = t.as<node::Fst>()) {
      if (n->arg->is_value) break;
      descend(Slot::FstArg, n->arg);
    } else if (const auto* n = t.as<node::Snd>()) {
      if (n->arg->is_value) break;
      descend(Slot::SndArg, n->arg);
    } else if (const auto* n = t.as<node::If>()) {
      const auto* p = n->cond->as<node::PredApp>();
      if (!p) break;
      ctx.push({Slot::IfCond, cur, nullptr});
      if (p->arg->is_value) return BoolRedex{std::move(ctx), n->cond};
      ctx.push({Slot::PredArg, nullptr, n->cond});
      cur = p->arg;
    } else if (const auto* n = t.as<node::FunApp>()) {
      if (n->arg->is_value) break;
      descend(Slot::AppArg, n->arg);
    } else if (const auto* n = t.as<node::Rd>()) {
      if (!n->at->is_value) {
        descend(Slot::RdAt, n->at);
      } else if (!n->cotangent->is_value) {
        descend(Slot::RdCotangent, n->cotangent);
      } else {
        break;
      }
    } else {
      // letrec is always a redex; values never get here.
      break;
    }
  }
  return TermRedex{std::move(ctx), cur};
}

// ---- the machine ------------------------------------------------------------

namespace {

enum class Mode { Eval, Sym };

using Result = std::variant<Value, TraceTerm>;

// Waiting for the value of the redex of E[R] (ordinary context rule).
struct EvalCtxFrame {
  EvalContext ctx;
  FunEnv phi;
  ValueEnv rho;
};
// Waiting for the trace C of the redex of E[R] (symbolic context rule).
struct SymCtxFrame {
  EvalContext ctx;
  FunEnv phi;
  ValueEnv rho;
};
// Waiting for the value of that C.
struct SymValueFrame {
  EvalContext ctx;
  FunEnv phi;
  ValueEnv rho;
  TraceTerm c;
};
// Waiting for a trace D; produces let x:T = bound in D.
struct WrapFrame {
  std::string x;
  Type type;
  TraceTerm bound;
};
// Waiting for the trace of an rd body.
struct RdiffFrame {
  std::string x;
  Type type;
  Value point;
  Value cotangent;
  ValueEnv rho;
};
// Waiting for a trace to evaluate ordinarily (the ordinary rd rule).
struct TraceEvalFrame {
  FunEnv phi;
  ValueEnv rho;
};

using Frame = std::variant<EvalCtxFrame, SymCtxFrame, SymValueFrame, WrapFrame, RdiffFrame, TraceEvalFrame>;

struct Task {
  Mode mode;
  FunEnv phi;
  ValueEnv rho;
  TermPtr term;
};

TraceTerm as_trace(const TermPtr& t) {
  auto out = TraceTerm::from_term(t);
  if (!out) throw InternalError("expected a trace term");
  return *out;
}

class Machine {
 public:
  explicit Machine(Session& s) : s_(s) {}

  Result run(Task task) {
    std::vector<Frame> stack;
    std::optional<Task> cur = std::move(task);
    std::optional<Result> ret;
    for (;;) {
      if (cur) {
        Task t = std::move(*cur);
        cur.reset();
        step(std::move(t), stack, cur, ret);
        continue;
      }
      if (stack.empty()) return std::move(*ret);
      Frame f = std::move(stack.back());
      stack.pop_back();
      Result r = std::move(*ret);
      ret.reset();
      resume(std::move(f), std::move(r), stack, cur, ret);
    }
  }

 private:
  void step(Task t, std::vector<Frame>& stack, std::optional<Task>& cur, std::optional<Result>& ret) {
    Decomposition d = decompose(t.term);
    if (auto* v = std::get_if<IsValue>(&d)) {
      if (t.mode == Mode::Eval) {
        ret = apply_env_value(t.rho, v->value);
      } else {
        ret = TraceTerm::from_value(v->value);
      }
      return;
    }
    if (auto* b = std::get_if<BoolRedex>(&d)) {
      s_.tick();
      bool value = bool_value(t.rho, b->redex);
      cur = Task{t.mode, std::move(t.phi), std::move(t.rho), b->context.plug_bool(mk::truth(value))};
      return;
    }
    auto& tr = std::get<TermRedex>(d);
    if (!tr.context.empty()) {
      if (t.mode == Mode::Eval) {
        stack.push_back(EvalCtxFrame{std::move(tr.context), t.phi, t.rho});
      } else {
        stack.push_back(SymCtxFrame{std::move(tr.context), t.phi, t.rho});
      }
      cur = Task{t.mode, std::move(t.phi), std::move(t.rho), tr.redex};
      return;
    }
    contract(std::move(t), stack, cur, ret);
  }

  bool bool_value(const ValueEnv& rho, const BoolPtr& b) {
    const auto* p = b->as<node::PredApp>();
    Value arg = apply_env_value(rho, *Value::from_term(p->arg));
    auto r = prim_bool_eval(s_.registry(), p->pred, arg, s_.monitor);
    if (!r) {
      const PrimPred* pred = s_.registry().pred(p->pred);
      throw Stuck(pred ? pred->display : p->pred, arg);
    }
    if (s_.monitor) s_.monitor->branch(p->pred, *r);
    return *r;
  }

  Value value_of(const ValueEnv& rho, const TermPtr& t) { return apply_env_value(rho, *Value::from_term(t)); }

  // The redex is the whole term.
  void contract(Task t, std::vector<Frame>& stack, std::optional<Task>& cur, std::optional<Result>& ret) {
    s_.tick();
    const Term& r = *t.term;
    const bool sym = t.mode == Mode::Sym;

    if (const auto* n = r.as<node::Add>()) {
      if (sym) {
        ret = as_trace(t.term);
      } else {
        ret = Value::real(value_of(t.rho, n->lhs).as_real() + value_of(t.rho, n->rhs).as_real());
      }
      return;
    }
    if (const auto* n = r.as<node::PrimApp>()) {
      if (sym) {
        ret = as_trace(t.term);
        return;
      }
      Value arg = value_of(t.rho, n->arg);
      auto out = prim_eval(s_.registry(), n->op, arg, s_.monitor);
      if (!out) throw Stuck(n->op, arg);
      ret = *out;
      return;
    }
    if (const auto* n = r.as<node::Fst>()) {
      if (sym) {
        ret = as_trace(t.term);
      } else {
        ret = value_of(t.rho, n->arg).first();
      }
      return;
    }
    if (const auto* n = r.as<node::Snd>()) {
      if (sym) {
        ret = as_trace(t.term);
      } else {
        ret = value_of(t.rho, n->arg).second();
      }
      return;
    }
    if (const auto* n = r.as<node::Let>()) {
      Value v = value_of(t.rho, n->bound);
      if (sym) stack.push_back(WrapFrame{n->var, n->type, as_trace(n->bound)});
      cur = Task{t.mode, std::move(t.phi), t.rho.insert(n->var, v), n->body};
      return;
    }
    if (const auto* n = r.as<node::If>()) {
      bool taken = n->cond->as<node::True>() != nullptr;
      cur = Task{t.mode, std::move(t.phi), std::move(t.rho), taken ? n->then_branch : n->else_branch};
      return;
    }
    if (const auto* n = r.as<node::LetRec>()) {
      FreeVars fv = free_vars(n->body);
      for (const auto& v : fv.vars) {
        if (v != n->param) throw InternalError("closure body of " + n->fn + " has global variable " + v);
      }
      for (const auto& f : fv.funs) {
        if (f != n->fn && !t.phi.contains(f)) throw InternalError("closure body of " + n->fn + " calls unbound " + f);
      }
      auto cl = std::make_shared<const Closure>(
          Closure{t.phi, n->fn, n->param, n->param_type, n->result_type, n->body});
      cur = Task{t.mode, t.phi.insert(n->fn, cl), std::move(t.rho), n->scope};
      return;
    }
    if (const auto* n = r.as<node::FunApp>()) {
      const ClosurePtr* cl = t.phi.find(n->fn);
      if (!cl) throw InternalError("unbound function '" + n->fn + "'");
      const Closure& c = **cl;
      Value arg = value_of(t.rho, n->arg);
      if (sym) stack.push_back(WrapFrame{c.param, c.param_type, as_trace(n->arg)});
      cur = Task{t.mode, c.env.insert(c.fn, *cl), ValueEnv{}.insert(c.param, arg), c.body};
      return;
    }
    if (const auto* n = r.as<node::Rd>()) {
      Value point = *Value::from_term(n->at);
      Value cot = *Value::from_term(n->cotangent);
      std::string x = n->var;
      TermPtr body = n->body;
      if (free_vars(point.term()).vars.contains(x) || free_vars(cot.term()).vars.contains(x)) {
        std::string fresh = s_.supply().fresh();
        body = rename_free(body, x, fresh);
        x = fresh;
      }
      Value closed_point = apply_env_value(t.rho, point);
      if (!sym) stack.push_back(TraceEvalFrame{t.phi, t.rho});
      stack.push_back(RdiffFrame{x, n->type, point, cot, t.rho});
      cur = Task{Mode::Sym, std::move(t.phi), t.rho.insert(x, closed_point), body};
      return;
    }
    throw InternalError("contract: not a redex");
  }

  void resume(Frame f, Result r, std::vector<Frame>& stack, std::optional<Task>& cur, std::optional<Result>& ret) {
    if (auto* e = std::get_if<EvalCtxFrame>(&f)) {
      std::string x = s_.supply().fresh();
      cur = Task{Mode::Eval, std::move(e->phi), e->rho.insert(x, std::get<Value>(r)), e->ctx.plug(mk::var(x))};
      return;
    }
    if (auto* e = std::get_if<SymCtxFrame>(&f)) {
      TraceTerm c = std::get<TraceTerm>(r);
      TermPtr ct = c.term();
      stack.push_back(SymValueFrame{std::move(e->ctx), e->phi, e->rho, std::move(c)});
      cur = Task{Mode::Eval, std::move(e->phi), std::move(e->rho), ct};
      return;
    }
    if (auto* e = std::get_if<SymValueFrame>(&f)) {
      const Value& v = std::get<Value>(r);
      std::string x = s_.supply().fresh();
      stack.push_back(WrapFrame{x, type_of_closed_value(v), std::move(e->c)});
      cur = Task{Mode::Sym, std::move(e->phi), e->rho.insert(x, v), e->ctx.plug(mk::var(x))};
      return;
    }
    if (auto* e = std::get_if<WrapFrame>(&f)) {
      ret = TraceTerm::let(std::move(e->x), std::move(e->type), e->bound, std::get<TraceTerm>(r));
      return;
    }
    if (auto* e = std::get_if<RdiffFrame>(&f)) {
      const TraceTerm& c = std::get<TraceTerm>(r);
      std::function<void()> tick = [this] { s_.tick(); };
      TraceTerm out = rdiff(e->x, e->type, c, e->point, e->cotangent, s_.supply(), tick, s_.registry());
      if (s_.on_rdiff) s_.on_rdiff(RdiffEvent{e->rho, e->x, e->type, c, e->point, e->cotangent, out});
      ret = std::move(out);
      return;
    }
    if (auto* e = std::get_if<TraceEvalFrame>(&f)) {
      cur = Task{Mode::Eval, std::move(e->phi), std::move(e->rho), std::get<TraceTerm>(r).term()};
      return;
    }
  }

  Session& s_;
};

void avoid_names(Session& s, const FunEnv& phi, const TermPtr& m) {
  s.supply().avoid_all(m);
  phi.for_each([&](const std::string&, const ClosurePtr& c) { s.supply().avoid_all(c->body); });
}

}  // namespace

Value eval(Session& s, const FunEnv& phi, const ValueEnv& rho, const TermPtr& m) {
  avoid_names(s, phi, m);
  return std::get<Value>(Machine(s).run(Task{Mode::Eval, phi, rho, m}));
}

bool eval_bool(Session& s, const FunEnv& phi, const ValueEnv& rho, const BoolPtr& b) {
  if (b->as<node::True>()) return true;
  if (b->as<node::False>()) return false;
  const auto* p = b->as<node::PredApp>();
  Value arg = eval(s, phi, rho, p->arg);
  s.tick();
  auto r = prim_bool_eval(s.registry(), p->pred, arg, s.monitor);
  if (!r) {
    const PrimPred* pred = s.registry().pred(p->pred);
    throw Stuck(pred ? pred->display : p->pred, arg);
  }
  if (s.monitor) s.monitor->branch(p->pred, *r);
  return *r;
}

TraceTerm sym_eval(Session& s, const FunEnv& phi, const ValueEnv& rho, const TermPtr& m) {
  avoid_names(s, phi, m);
  return std::get<TraceTerm>(Machine(s).run(Task{Mode::Sym, phi, rho, m}));
}

}  // namespace dpl
