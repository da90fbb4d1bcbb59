#include "dpl/elaborate.hpp"

#include <set>
#include <stdexcept>

#include "dpl/errors.hpp"

namespace dpl {

Value zero_of_type(const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Real:
      return Value::real(0.0);
    case Type::Kind::Unit:
      return Value::unit();
    case Type::Kind::Prod:
      return Value::pair(zero_of_type(t.left()), zero_of_type(t.right()), ProdTypes{t.left(), t.right()});
  }
  return Value::unit();
}

TermPtr add_at_type(const Type& t, TermPtr m, TermPtr n, VarSupply& supply) {
  switch (t.kind()) {
    case Type::Kind::Real:
      return mk::add(std::move(m), std::move(n));
    case Type::Kind::Unit: {
      std::string a = supply.fresh();
      std::string b = supply.fresh();
      return mk::let(a, Type::unit(), std::move(m), mk::let(b, Type::unit(), std::move(n), mk::unit()));
    }
    case Type::Kind::Prod: {
      const Type& l = t.left();
      const Type& r = t.right();
      std::string x1 = supply.fresh(), x2 = supply.fresh();
      std::string y1 = supply.fresh(), y2 = supply.fresh();
      TermPtr sum = mk::pair(add_at_type(l, mk::var(x1), mk::var(y1), supply),
                             add_at_type(r, mk::var(x2), mk::var(y2), supply), ProdTypes{l, r});
      TermPtr inner = elab_tuple_let({{y1, l}, {y2, r}}, std::move(n), sum, supply);
      return elab_tuple_let({{x1, l}, {x2, r}}, std::move(m), inner, supply);
    }
  }
  return nullptr;
}

TraceTerm add_at_type(const Type& t, const TraceTerm& m, const TraceTerm& n, VarSupply& supply) {
  auto out = TraceTerm::from_term(add_at_type(t, m.term(), n.term(), supply));
  if (!out) throw InternalError("add_at_type produced a non-trace");
  return *out;
}

TermPtr elab_tuple_let(const std::vector<Binding>& bindings, TermPtr m, TermPtr n, VarSupply& supply) {
  std::set<std::string> seen;
  for (const auto& b : bindings) {
    if (!seen.insert(b.first).second) throw std::invalid_argument("duplicate binder '" + b.first + "'");
  }
  if (bindings.empty()) return mk::let(supply.fresh(), Type::unit(), std::move(m), std::move(n));
  if (bindings.size() == 1) return mk::let(bindings[0].first, bindings[0].second, std::move(m), std::move(n));

  std::vector<Type> types;
  for (const auto& b : bindings) types.push_back(b.second);
  Type whole = Type::iterated(types);
  Type init = Type::iterated(std::span<const Type>(types).first(types.size() - 1));
  const Type& last = types.back();
  ProdTypes deco{init, last};

  std::string z = supply.fresh();
  std::vector<Binding> front(bindings.begin(), bindings.end() - 1);
  TermPtr tail = mk::let(bindings.back().first, last, mk::snd(mk::var(z), deco), std::move(n));
  TermPtr body = elab_tuple_let(front, mk::fst(mk::var(z), deco), tail, supply);
  return mk::let(z, whole, std::move(m), body);
}

TraceTerm elab_tuple_let(const std::vector<Binding>& bindings, const TraceTerm& m, const TraceTerm& n,
                         VarSupply& supply) {
  auto out = TraceTerm::from_term(elab_tuple_let(bindings, m.term(), n.term(), supply));
  if (!out) throw InternalError("elab_tuple_let produced a non-trace");
  return *out;
}

TermPtr elab_grad(const std::string& x, std::size_t n, TermPtr body, TermPtr at) {
  return mk::rd(x, Type::real_power(n), std::move(body), std::move(at), mk::constant(1.0));
}

TermPtr elab_fd(const std::string& x, const Type& t, TermPtr body, const Type& u, TermPtr at, TermPtr tangent,
                VarSupply& supply) {
  std::string y = supply.fresh();
  TermPtr inner = mk::rd(x, t, std::move(body), std::move(at), mk::var(y));
  return mk::rd(y, u, inner, zero_of_type(u).term(), std::move(tangent));
}

}  // namespace dpl
