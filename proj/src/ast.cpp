#include "dpl/ast.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

namespace dpl {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

TermPtr make(TermNode node, Span span, bool is_value, bool is_ground, bool is_trace) {
  auto t = std::make_shared<Term>();
  t->node = std::move(node);
  t->span = span;
  t->is_value = is_value;
  t->is_ground = is_ground;
  t->is_trace = is_trace;
  return t;
}

// Type of a closed value; the public, throwing version lives in typecheck.
std::optional<Type> ground_type(const Term& t) {
  if (t.as<node::Const>()) return Type::real();
  if (t.as<node::UnitVal>()) return Type::unit();
  if (const auto* p = t.as<node::Pair>()) {
    auto l = ground_type(*p->first);
    auto r = ground_type(*p->second);
    if (!l || !r) return std::nullopt;
    return Type::prod(*l, *r);
  }
  return std::nullopt;
}

}  // namespace

namespace mk {

TermPtr var(std::string name, Span span) {
  return make(node::Var{std::move(name)}, span, true, false, true);
}

TermPtr constant(double value, Span span) { return make(node::Const{value}, span, true, true, true); }

TermPtr add(TermPtr lhs, TermPtr rhs, Span span) {
  bool trace = lhs->is_trace && rhs->is_trace;
  return make(node::Add{std::move(lhs), std::move(rhs)}, span, false, false, trace);
}

TermPtr prim(std::string op, TermPtr arg, Span span) {
  bool trace = arg->is_trace;
  return make(node::PrimApp{std::move(op), std::move(arg)}, span, false, false, trace);
}

TermPtr let(std::string var, Type type, TermPtr bound, TermPtr body, Span span) {
  bool trace = bound->is_trace && body->is_trace;
  return make(node::Let{std::move(var), std::move(type), std::move(bound), std::move(body)}, span, false,
              false, trace);
}

TermPtr unit(Span span) { return make(node::UnitVal{}, span, true, true, true); }

TermPtr pair(TermPtr first, TermPtr second, std::optional<ProdTypes> types, Span span) {
  bool value = first->is_value && second->is_value;
  bool ground = first->is_ground && second->is_ground;
  bool trace = first->is_trace && second->is_trace;
  return make(node::Pair{std::move(types), std::move(first), std::move(second)}, span, value, ground, trace);
}

TermPtr fst(TermPtr arg, std::optional<ProdTypes> types, Span span) {
  bool trace = arg->is_trace;
  return make(node::Fst{std::move(types), std::move(arg)}, span, false, false, trace);
}

TermPtr snd(TermPtr arg, std::optional<ProdTypes> types, Span span) {
  bool trace = arg->is_trace;
  return make(node::Snd{std::move(types), std::move(arg)}, span, false, false, trace);
}

TermPtr cond(BoolPtr c, TermPtr then_branch, TermPtr else_branch, Span span) {
  return make(node::If{std::move(c), std::move(then_branch), std::move(else_branch)}, span, false, false,
              false);
}

TermPtr letrec(std::string fn, std::string param, Type param_type, Type result_type, TermPtr body,
               TermPtr scope, Span span) {
  return make(node::LetRec{std::move(fn), std::move(param), std::move(param_type), std::move(result_type),
                           std::move(body), std::move(scope)},
              span, false, false, false);
}

TermPtr app(std::string fn, TermPtr arg, Span span) {
  return make(node::FunApp{std::move(fn), std::move(arg)}, span, false, false, false);
}

TermPtr rd(std::string var, Type type, TermPtr body, TermPtr at, TermPtr cotangent, Span span) {
  return make(node::Rd{std::move(var), std::move(type), std::move(body), std::move(at), std::move(cotangent)},
              span, false, false, false);
}

TermPtr mul(TermPtr lhs, TermPtr rhs, Span span) {
  return prim("mul", pair(std::move(lhs), std::move(rhs), std::nullopt, span), span);
}

BoolPtr truth(bool value, Span span) {
  auto b = std::make_shared<BoolTerm>();
  if (value) {
    b->node = node::True{};
  } else {
    b->node = node::False{};
  }
  b->span = span;
  return b;
}

BoolPtr pred(std::string name, TermPtr arg, Span span) {
  auto b = std::make_shared<BoolTerm>();
  b->node = node::PredApp{std::move(name), std::move(arg)};
  b->span = span;
  return b;
}

}  // namespace mk

// ---- Value ------------------------------------------------------------------

Value Value::var(std::string name) { return Value(mk::var(std::move(name))); }

Value Value::real(double r) { return Value(mk::constant(r)); }

Value Value::unit() { return Value(mk::unit()); }

Value Value::pair(const Value& first, const Value& second, std::optional<ProdTypes> types) {
  if (!types) {
    auto l = ground_type(*first.term());
    auto r = ground_type(*second.term());
    if (l && r) types = ProdTypes{*l, *r};
  }
  return Value(mk::pair(first.term(), second.term(), std::move(types)));
}

std::optional<Value> Value::from_term(TermPtr term) {
  if (!term || !term->is_value) return std::nullopt;
  return Value(std::move(term));
}

const std::string& Value::var_name() const {
  const auto* v = term_->as<node::Var>();
  if (!v) throw std::logic_error("Value::var_name on non-variable");
  return v->name;
}

double Value::as_real() const {
  const auto* c = term_->as<node::Const>();
  if (!c) throw std::logic_error("Value::as_real on non-constant");
  return c->value;
}

Value Value::first() const {
  const auto* p = term_->as<node::Pair>();
  if (!p) throw std::logic_error("Value::first on non-pair");
  return Value(p->first);
}

Value Value::second() const {
  const auto* p = term_->as<node::Pair>();
  if (!p) throw std::logic_error("Value::second on non-pair");
  return Value(p->second);
}

bool same_value(const Value& a, const Value& b) {
  const Term& x = *a.term();
  const Term& y = *b.term();
  if (x.node.index() != y.node.index()) return false;
  if (const auto* c = x.as<node::Const>()) {
    return std::bit_cast<std::uint64_t>(c->value) == std::bit_cast<std::uint64_t>(y.as<node::Const>()->value);
  }
  if (const auto* v = x.as<node::Var>()) return v->name == y.as<node::Var>()->name;
  if (x.as<node::Pair>()) return same_value(a.first(), b.first()) && same_value(a.second(), b.second());
  return true;
}

// ---- TraceTerm --------------------------------------------------------------

TraceTerm TraceTerm::var(std::string name) { return TraceTerm(mk::var(std::move(name))); }

TraceTerm TraceTerm::constant(double r) { return TraceTerm(mk::constant(r)); }

TraceTerm TraceTerm::add(const TraceTerm& lhs, const TraceTerm& rhs) {
  return TraceTerm(mk::add(lhs.term_, rhs.term_));
}

TraceTerm TraceTerm::prim(std::string op, const TraceTerm& arg) {
  return TraceTerm(mk::prim(std::move(op), arg.term_));
}

TraceTerm TraceTerm::let(std::string var, Type type, const TraceTerm& bound, const TraceTerm& body) {
  return TraceTerm(mk::let(std::move(var), std::move(type), bound.term_, body.term_));
}

TraceTerm TraceTerm::unit() { return TraceTerm(mk::unit()); }

TraceTerm TraceTerm::pair(const TraceTerm& first, const TraceTerm& second, std::optional<ProdTypes> types) {
  return TraceTerm(mk::pair(first.term_, second.term_, std::move(types)));
}

TraceTerm TraceTerm::fst(const TraceTerm& arg, std::optional<ProdTypes> types) {
  return TraceTerm(mk::fst(arg.term_, std::move(types)));
}

TraceTerm TraceTerm::snd(const TraceTerm& arg, std::optional<ProdTypes> types) {
  return TraceTerm(mk::snd(arg.term_, std::move(types)));
}

std::optional<TraceTerm> TraceTerm::from_term(TermPtr term) {
  if (!term || !term->is_trace) return std::nullopt;
  return TraceTerm(std::move(term));
}

// ---- VarSupply --------------------------------------------------------------

std::string VarSupply::fresh() {
  for (;;) {
    std::string name = prefix_ + std::to_string(counter_++);
    if (!avoid_.contains(name)) return name;
  }
}

void VarSupply::avoid(const std::string& name) {
  if (name.starts_with(prefix_)) avoid_.insert(name);
}

void VarSupply::avoid_all(const TermPtr& term) {
  std::set<std::string> names;
  collect_names(term, names);
  for (const auto& n : names) avoid(n);
}

// ---- free variables ---------------------------------------------------------

namespace {

void fv(const TermPtr& t, std::set<std::string>& bound_vars, std::set<std::string>& bound_funs, FreeVars& out);

void fv_bool(const BoolPtr& b, std::set<std::string>& bv, std::set<std::string>& bf, FreeVars& out) {
  if (const auto* p = b->as<node::PredApp>()) fv(p->arg, bv, bf, out);
}

// Runs `f` with `name` temporarily added to `bound`.
template <class F>
void under(std::set<std::string>& bound, const std::string& name, F&& f) {
  bool inserted = bound.insert(name).second;
  f();
  if (inserted) bound.erase(name);
}

void fv(const TermPtr& t, std::set<std::string>& bv, std::set<std::string>& bf, FreeVars& out) {
  if (t->is_ground) return;
  std::visit(overloaded{
                 [&](const node::Var& n) {
                   if (!bv.contains(n.name)) out.vars.insert(n.name);
                 },
                 [](const node::Const&) {},
                 [](const node::UnitVal&) {},
                 [&](const node::Add& n) {
                   fv(n.lhs, bv, bf, out);
                   fv(n.rhs, bv, bf, out);
                 },
                 [&](const node::PrimApp& n) { fv(n.arg, bv, bf, out); },
                 [&](const node::Let& n) {
                   fv(n.bound, bv, bf, out);
                   under(bv, n.var, [&] { fv(n.body, bv, bf, out); });
                 },
                 [&](const node::Pair& n) {
                   fv(n.first, bv, bf, out);
                   fv(n.second, bv, bf, out);
                 },
                 [&](const node::Fst& n) { fv(n.arg, bv, bf, out); },
                 [&](const node::Snd& n) { fv(n.arg, bv, bf, out); },
                 [&](const node::If& n) {
                   fv_bool(n.cond, bv, bf, out);
                   fv(n.then_branch, bv, bf, out);
                   fv(n.else_branch, bv, bf, out);
                 },
                 [&](const node::LetRec& n) {
                   under(bf, n.fn, [&] {
                     under(bv, n.param, [&] { fv(n.body, bv, bf, out); });
                     fv(n.scope, bv, bf, out);
                   });
                 },
                 [&](const node::FunApp& n) {
                   if (!bf.contains(n.fn)) out.funs.insert(n.fn);
                   fv(n.arg, bv, bf, out);
                 },
                 [&](const node::Rd& n) {
                   under(bv, n.var, [&] { fv(n.body, bv, bf, out); });
                   fv(n.at, bv, bf, out);
                   fv(n.cotangent, bv, bf, out);
                 },
             },
             t->node);
}

}  // namespace

FreeVars free_vars(const TermPtr& term) {
  FreeVars out;
  std::set<std::string> bv, bf;
  fv(term, bv, bf, out);
  return out;
}

FreeVars free_vars(const BoolPtr& term) {
  FreeVars out;
  std::set<std::string> bv, bf;
  fv_bool(term, bv, bf, out);
  return out;
}

// ---- alpha equivalence ------------------------------------------------------

namespace {

class AlphaEq {
 public:
  bool terms(const TermPtr& a, const TermPtr& b) {
    if (a == b && vars_a_.empty() && funs_a_.empty()) return true;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        overloaded{
            [&](const node::Var& x) { return same_var(vars_a_, vars_b_, x.name, b->as<node::Var>()->name); },
            [&](const node::Const& x) {
              return std::bit_cast<std::uint64_t>(x.value) ==
                     std::bit_cast<std::uint64_t>(b->as<node::Const>()->value);
            },
            [&](const node::UnitVal&) { return true; },
            [&](const node::Add& x) {
              const auto& y = *b->as<node::Add>();
              return terms(x.lhs, y.lhs) && terms(x.rhs, y.rhs);
            },
            [&](const node::PrimApp& x) {
              const auto& y = *b->as<node::PrimApp>();
              return x.op == y.op && terms(x.arg, y.arg);
            },
            [&](const node::Let& x) {
              const auto& y = *b->as<node::Let>();
              if (!(x.type == y.type) || !terms(x.bound, y.bound)) return false;
              return bind(x.var, y.var, [&] { return terms(x.body, y.body); });
            },
            [&](const node::Pair& x) {
              const auto& y = *b->as<node::Pair>();
              return decorations(x.types, y.types) && terms(x.first, y.first) && terms(x.second, y.second);
            },
            [&](const node::Fst& x) {
              const auto& y = *b->as<node::Fst>();
              return decorations(x.types, y.types) && terms(x.arg, y.arg);
            },
            [&](const node::Snd& x) {
              const auto& y = *b->as<node::Snd>();
              return decorations(x.types, y.types) && terms(x.arg, y.arg);
            },
            [&](const node::If& x) {
              const auto& y = *b->as<node::If>();
              return bools(x.cond, y.cond) && terms(x.then_branch, y.then_branch) &&
                     terms(x.else_branch, y.else_branch);
            },
            [&](const node::LetRec& x) {
              const auto& y = *b->as<node::LetRec>();
              if (!(x.param_type == y.param_type) || !(x.result_type == y.result_type)) return false;
              funs_a_.push_back(x.fn);
              funs_b_.push_back(y.fn);
              bool ok = bind(x.param, y.param, [&] { return terms(x.body, y.body); }) && terms(x.scope, y.scope);
              funs_a_.pop_back();
              funs_b_.pop_back();
              return ok;
            },
            [&](const node::FunApp& x) {
              const auto& y = *b->as<node::FunApp>();
              return same_var(funs_a_, funs_b_, x.fn, y.fn) && terms(x.arg, y.arg);
            },
            [&](const node::Rd& x) {
              const auto& y = *b->as<node::Rd>();
              if (!(x.type == y.type)) return false;
              return bind(x.var, y.var, [&] { return terms(x.body, y.body); }) && terms(x.at, y.at) &&
                     terms(x.cotangent, y.cotangent);
            },
        },
        a->node);
  }

  bool bools(const BoolPtr& a, const BoolPtr& b) {
    if (a->node.index() != b->node.index()) return false;
    if (const auto* p = a->as<node::PredApp>()) {
      const auto* q = b->as<node::PredApp>();
      return p->pred == q->pred && terms(p->arg, q->arg);
    }
    return true;
  }

 private:
  template <class F>
  bool bind(const std::string& x, const std::string& y, F&& f) {
    vars_a_.push_back(x);
    vars_b_.push_back(y);
    bool ok = f();
    vars_a_.pop_back();
    vars_b_.pop_back();
    return ok;
  }

  static bool same_var(const std::vector<std::string>& sa, const std::vector<std::string>& sb,
                       const std::string& x, const std::string& y) {
    auto ia = index_of(sa, x);
    auto ib = index_of(sb, y);
    if (ia < 0 && ib < 0) return x == y;
    return ia == ib;
  }

  static long index_of(const std::vector<std::string>& s, const std::string& x) {
    for (long i = static_cast<long>(s.size()) - 1; i >= 0; --i) {
      if (s[static_cast<std::size_t>(i)] == x) return i;
    }
    return -1;
  }

  static bool decorations(const std::optional<ProdTypes>& a, const std::optional<ProdTypes>& b) {
    return !a || !b || *a == *b;
  }

  std::vector<std::string> vars_a_, vars_b_, funs_a_, funs_b_;
};

}  // namespace

bool alpha_equal(const TermPtr& a, const TermPtr& b) { return AlphaEq{}.terms(a, b); }

bool alpha_equal(const BoolPtr& a, const BoolPtr& b) { return AlphaEq{}.bools(a, b); }

// ---- renaming ---------------------------------------------------------------

namespace {

TermPtr rename(const TermPtr& t, const std::string& from, const std::string& to);

BoolPtr rename_bool(const BoolPtr& b, const std::string& from, const std::string& to) {
  const auto* p = b->as<node::PredApp>();
  if (!p) return b;
  TermPtr arg = rename(p->arg, from, to);
  if (arg == p->arg) return b;
  return mk::pred(p->pred, arg, b->span);
}

TermPtr rename(const TermPtr& t, const std::string& from, const std::string& to) {
  if (t->is_ground) return t;
  auto r = [&](const TermPtr& c) { return rename(c, from, to); };
  return std::visit(
      overloaded{
          [&](const node::Var& n) -> TermPtr { return n.name == from ? mk::var(to, t->span) : t; },
          [&](const node::Const&) -> TermPtr { return t; },
          [&](const node::UnitVal&) -> TermPtr { return t; },
          [&](const node::Add& n) -> TermPtr {
            auto l = r(n.lhs), rr = r(n.rhs);
            return (l == n.lhs && rr == n.rhs) ? t : mk::add(l, rr, t->span);
          },
          [&](const node::PrimApp& n) -> TermPtr {
            auto a = r(n.arg);
            return a == n.arg ? t : mk::prim(n.op, a, t->span);
          },
          [&](const node::Let& n) -> TermPtr {
            auto b = r(n.bound);
            auto body = n.var == from ? n.body : r(n.body);
            return (b == n.bound && body == n.body) ? t : mk::let(n.var, n.type, b, body, t->span);
          },
          [&](const node::Pair& n) -> TermPtr {
            auto a = r(n.first), b = r(n.second);
            return (a == n.first && b == n.second) ? t : mk::pair(a, b, n.types, t->span);
          },
          [&](const node::Fst& n) -> TermPtr {
            auto a = r(n.arg);
            return a == n.arg ? t : mk::fst(a, n.types, t->span);
          },
          [&](const node::Snd& n) -> TermPtr {
            auto a = r(n.arg);
            return a == n.arg ? t : mk::snd(a, n.types, t->span);
          },
          [&](const node::If& n) -> TermPtr {
            auto c = rename_bool(n.cond, from, to);
            auto a = r(n.then_branch), b = r(n.else_branch);
            return (c == n.cond && a == n.then_branch && b == n.else_branch) ? t : mk::cond(c, a, b, t->span);
          },
          [&](const node::LetRec& n) -> TermPtr {
            auto body = n.param == from ? n.body : r(n.body);
            auto scope = r(n.scope);
            return (body == n.body && scope == n.scope)
                       ? t
                       : mk::letrec(n.fn, n.param, n.param_type, n.result_type, body, scope, t->span);
          },
          [&](const node::FunApp& n) -> TermPtr {
            auto a = r(n.arg);
            return a == n.arg ? t : mk::app(n.fn, a, t->span);
          },
          [&](const node::Rd& n) -> TermPtr {
            auto body = n.var == from ? n.body : r(n.body);
            auto at = r(n.at), cot = r(n.cotangent);
            return (body == n.body && at == n.at && cot == n.cotangent)
                       ? t
                       : mk::rd(n.var, n.type, body, at, cot, t->span);
          },
      },
      t->node);
}

}  // namespace

TermPtr rename_free(const TermPtr& term, const std::string& from, const std::string& to) {
  return rename(term, from, to);
}

void collect_names(const TermPtr& t, std::set<std::string>& out) {
  std::visit(overloaded{
                 [&](const node::Var& n) { out.insert(n.name); },
                 [](const node::Const&) {},
                 [](const node::UnitVal&) {},
                 [&](const node::Add& n) {
                   collect_names(n.lhs, out);
                   collect_names(n.rhs, out);
                 },
                 [&](const node::PrimApp& n) { collect_names(n.arg, out); },
                 [&](const node::Let& n) {
                   out.insert(n.var);
                   collect_names(n.bound, out);
                   collect_names(n.body, out);
                 },
                 [&](const node::Pair& n) {
                   collect_names(n.first, out);
                   collect_names(n.second, out);
                 },
                 [&](const node::Fst& n) { collect_names(n.arg, out); },
                 [&](const node::Snd& n) { collect_names(n.arg, out); },
                 [&](const node::If& n) {
                   if (const auto* p = n.cond->as<node::PredApp>()) collect_names(p->arg, out);
                   collect_names(n.then_branch, out);
                   collect_names(n.else_branch, out);
                 },
                 [&](const node::LetRec& n) {
                   out.insert(n.fn);
                   out.insert(n.param);
                   collect_names(n.body, out);
                   collect_names(n.scope, out);
                 },
                 [&](const node::FunApp& n) {
                   out.insert(n.fn);
                   collect_names(n.arg, out);
                 },
                 [&](const node::Rd& n) {
                   out.insert(n.var);
                   collect_names(n.body, out);
                   collect_names(n.at, out);
                   collect_names(n.cotangent, out);
                 },
             },
             t->node);
}

std::size_t term_size(const TermPtr& t) {
  return std::visit(overloaded{
                        [](const node::Var&) -> std::size_t { return 1; },
                        [](const node::Const&) -> std::size_t { return 1; },
                        [](const node::UnitVal&) -> std::size_t { return 1; },
                        [](const node::Add& n) { return 1 + term_size(n.lhs) + term_size(n.rhs); },
                        [](const node::PrimApp& n) { return 1 + term_size(n.arg); },
                        [](const node::Let& n) { return 1 + term_size(n.bound) + term_size(n.body); },
                        [](const node::Pair& n) { return 1 + term_size(n.first) + term_size(n.second); },
                        [](const node::Fst& n) { return 1 + term_size(n.arg); },
                        [](const node::Snd& n) { return 1 + term_size(n.arg); },
                        [](const node::If& n) {
                          std::size_t c = 1;
                          if (const auto* p = n.cond->as<node::PredApp>()) c += term_size(p->arg);
                          return 1 + c + term_size(n.then_branch) + term_size(n.else_branch);
                        },
                        [](const node::LetRec& n) { return 1 + term_size(n.body) + term_size(n.scope); },
                        [](const node::FunApp& n) { return 1 + term_size(n.arg); },
                        [](const node::Rd& n) {
                          return 1 + term_size(n.body) + term_size(n.at) + term_size(n.cotangent);
                        },
                    },
                    t->node);
}

}  // namespace dpl
