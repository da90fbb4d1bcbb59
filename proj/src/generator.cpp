#include "dpl/generator.hpp"

#include <algorithm>
#include <functional>

namespace dpl {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

bool coin(std::mt19937_64& rng, double p) { return uniform(rng, 0.0, 1.0) < p; }

}  // namespace

Type gen_type(std::mt19937_64& rng, int max_leaves) {
  if (max_leaves <= 1) return coin(rng, 0.9) ? Type::real() : Type::unit();
  double u = uniform(rng, 0.0, 1.0);
  if (u < 0.5) return Type::real();
  if (u < 0.55) return Type::unit();
  int left = 1 + static_cast<int>(pick(rng, static_cast<std::size_t>(max_leaves - 1)));
  return Type::prod(gen_type(rng, left), gen_type(rng, max_leaves - left));
}

Value gen_value(std::mt19937_64& rng, const Type& t, double lo, double hi) {
  switch (t.kind()) {
    case Type::Kind::Real:
      return Value::real(uniform(rng, lo, hi));
    case Type::Kind::Unit:
      return Value::unit();
    case Type::Kind::Prod: {
      Value l = gen_value(rng, t.left(), lo, hi);
      Value r = gen_value(rng, t.right(), lo, hi);
      return Value::pair(l, r, ProdTypes{t.left(), t.right()});
    }
  }
  return Value::unit();
}

namespace {

struct Fn {
  std::string name;
  Type arg;
  Type result;
  /// Recursive; must be called on a bounded argument.
  bool bounded;
  /// Recursive or calls something recursive: keep out of rd bodies.
  bool heavy;
};

struct Scope {
  std::vector<std::pair<std::string, Type>> vars;
  std::vector<Fn> funs;
  int rd_nesting = 0;

  Scope with_var(std::string name, Type t) const {
    Scope s = *this;
    s.vars.emplace_back(std::move(name), std::move(t));
    return s;
  }
};

class Gen {
 public:
  Gen(std::uint64_t seed, const GenConfig& cfg) : rng_(seed), cfg_(cfg) {}

  TermPtr term(const Type& t, int d, const Scope& sc) {
    if (d <= 0) return leaf(t, sc);
    struct Option {
      double weight;
      std::function<TermPtr()> make;
    };
    std::vector<Option> opts;
    auto add = [&](double w, std::function<TermPtr()> f) { opts.push_back({w, std::move(f)}); };

    add(1.0, [&] { return leaf(t, sc); });
    add(1.5, [&] { return let_form(t, d, sc); });
    if (cfg_.allow_if) add(1.5, [&] { return if_form(t, d, sc); });
    add(0.6, [&] {
      Type other = gen_type(rng_, 2);
      return coin(rng_, 0.5) ? mk::fst(term(Type::prod(t, other), d - 1, sc))
                             : mk::snd(term(Type::prod(other, t), d - 1, sc));
    });
    if (cfg_.allow_letrec && d >= 2 && static_cast<int>(sc.funs.size()) < cfg_.max_functions) {
      add(1.0, [&] { return letrec_form(t, d, sc); });
    }
    if (std::any_of(sc.funs.begin(), sc.funs.end(), [&](const Fn& f) { return f.result == t; })) {
      add(1.5, [&] { return call(t, d, sc); });
    }
    if (cfg_.allow_rd && sc.rd_nesting < cfg_.max_rd_nesting) add(1.0, [&] { return rd_form(t, d, sc); });

    switch (t.kind()) {
      case Type::Kind::Real:
        add(2.0, [&] { return mk::add(term(t, d - 1, sc), term(t, d - 1, sc)); });
        add(2.0, [&] { return mk::mul(term(t, d - 1, sc), term(t, d - 1, sc)); });
        add(0.8, [&] { return mk::prim("neg", term(t, d - 1, sc)); });
        add(0.8, [&] { return mk::prim("sin", term(t, d - 1, sc)); });
        add(0.8, [&] { return mk::prim("cos", term(t, d - 1, sc)); });
        add(0.8, [&] { return mk::prim("exp", mk::mul(mk::constant(uniform(rng_, 0.2, 1.5)), sin_of(d, sc))); });
        add(0.8, [&] { return mk::prim("log", positive(d, sc)); });
        add(0.8, [&] { return mk::prim("div", mk::pair(term(t, d - 1, sc), positive(d, sc))); });
        add(0.8, [&] {
          std::size_t n = 1 + pick(rng_, 3);
          Type v = Type::real_power(n);
          return mk::prim("DProd" + std::to_string(n), mk::pair(term(v, d - 1, sc), term(v, d - 1, sc)));
        });
        break;
      case Type::Kind::Unit:
        add(1.0, [&] { return mk::unit(); });
        break;
      case Type::Kind::Prod:
        add(4.0, [&] { return mk::pair(term(t.left(), d - 1, sc), term(t.right(), d - 1, sc)); });
        break;
    }

    double total = 0.0;
    for (const auto& o : opts) total += o.weight;
    double u = uniform(rng_, 0.0, total);
    for (const auto& o : opts) {
      if (u < o.weight) return o.make();
      u -= o.weight;
    }
    return opts.back().make();
  }

 private:
  std::string fresh_var() { return "v" + std::to_string(next_var_++); }
  std::string fresh_fn() { return "f" + std::to_string(next_fn_++); }

  TermPtr leaf(const Type& t, const Scope& sc) {
    std::vector<const std::string*> matches;
    for (const auto& [name, ty] : sc.vars) {
      if (ty == t) matches.push_back(&name);
    }
    if (!matches.empty() && coin(rng_, 0.6)) return mk::var(*matches[pick(rng_, matches.size())]);
    switch (t.kind()) {
      case Type::Kind::Real:
        return mk::constant(uniform(rng_, -2.0, 2.0));
      case Type::Kind::Unit:
        return mk::unit();
      case Type::Kind::Prod:
        return mk::pair(leaf(t.left(), sc), leaf(t.right(), sc));
    }
    return mk::unit();
  }

  // k * sin(M): bounded by k.
  TermPtr sin_of(int d, const Scope& sc) { return mk::prim("sin", term(Type::real(), d - 1, sc)); }

  // M * M + c with c > 0, a safe argument for log and div.
  TermPtr positive(int d, const Scope& sc) {
    TermPtr m = term(Type::real(), d - 1, sc);
    return mk::add(mk::mul(m, m), mk::constant(uniform(rng_, 0.5, 2.0)));
  }

  TermPtr let_form(const Type& t, int d, const Scope& sc) {
    Type s = gen_type(rng_, 2);
    std::string x = fresh_var();
    TermPtr bound = term(s, d - 1, sc);
    return mk::let(x, s, bound, term(t, d - 1, sc.with_var(x, s)));
  }

  BoolPtr guard(int d, const Scope& sc) {
    TermPtr lhs = term(Type::real(), d - 1, sc);
    TermPtr rhs = mk::constant(uniform(rng_, -1.0, 1.0));
    return mk::pred(coin(rng_, 0.5) ? "lt" : "gt", mk::pair(lhs, rhs));
  }

  TermPtr if_form(const Type& t, int d, const Scope& sc) {
    BoolPtr b = guard(d, sc);
    TermPtr m = term(t, d - 1, sc);
    return mk::cond(b, m, term(t, d - 1, sc));
  }

  TermPtr letrec_form(const Type& t, int d, const Scope& sc) {
    std::string f = fresh_fn();
    std::string y = fresh_var();
    Type result = gen_type(rng_, 2);
    Scope body_scope;
    body_scope.funs = sc.funs;
    bool calls_heavy = std::any_of(sc.funs.begin(), sc.funs.end(), [](const Fn& g) { return g.heavy; });
    int bd = std::min(cfg_.fun_body_depth, d - 1);
    Fn fn;
    TermPtr body;
    if (coin(rng_, 0.5)) {
      // if y <. c then base else let r = f(y + -1) in step
      std::string r = fresh_var();
      Scope base_scope = body_scope.with_var(y, Type::real());
      TermPtr base = term(result, bd, base_scope);
      TermPtr step = term(result, bd, base_scope.with_var(r, result));
      TermPtr rec = mk::app(f, mk::add(mk::var(y), mk::constant(-1.0)));
      BoolPtr stop = mk::pred("lt", mk::pair(mk::var(y), mk::constant(uniform(rng_, -1.0, 1.0))));
      body = mk::cond(stop, base, mk::let(r, result, rec, step));
      fn = Fn{f, Type::real(), result, true, true};
    } else {
      Type arg = gen_type(rng_, 2);
      body = term(result, bd, body_scope.with_var(y, arg));
      fn = Fn{f, arg, result, false, calls_heavy};
    }
    Scope scope = sc;
    scope.funs.push_back(fn);
    return mk::letrec(f, y, fn.arg, result, body, term(t, d - 1, scope));
  }

  TermPtr call(const Type& t, int d, const Scope& sc) {
    std::vector<const Fn*> matches;
    for (const auto& f : sc.funs) {
      if (f.result == t) matches.push_back(&f);
    }
    const Fn& f = *matches[pick(rng_, matches.size())];
    TermPtr arg = f.bounded ? mk::mul(mk::constant(uniform(rng_, 0.0, 4.0)), sin_of(d, sc)) : term(f.arg, d - 1, sc);
    return mk::app(f.name, arg);
  }

  TermPtr rd_form(const Type& t, int d, const Scope& sc) {
    Type u = gen_type(rng_, 2);
    std::string x = fresh_var();
    Scope body_scope = sc.with_var(x, t);
    body_scope.rd_nesting = sc.rd_nesting + 1;
    std::erase_if(body_scope.funs, [](const Fn& f) { return f.heavy; });
    TermPtr body = term(u, std::min(d - 1, cfg_.rd_body_depth), body_scope);
    TermPtr at = term(t, std::min(d - 1, 2), sc);
    TermPtr cot = term(u, std::min(d - 1, 1), sc);
    return mk::rd(x, t, body, at, cot);
  }

  std::mt19937_64 rng_;
  GenConfig cfg_;
  int next_var_ = 0;
  int next_fn_ = 0;
};

}  // namespace

TermPtr gen_program(std::uint64_t seed, const TypeEnv& gamma, const Type& t, int depth, const GenConfig& cfg) {
  Gen g(seed, cfg);
  Scope sc;
  gamma.for_each([&](const std::string& name, const Type& ty) { sc.vars.emplace_back(name, ty); });
  return g.term(t, depth, sc);
}

}  // namespace dpl
