#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "dpl/type.hpp"

namespace dpl {

/// Source position of a node; line 0 means "synthesized".
struct Span {
  int line = 0;
  int column = 0;
};

struct Term;
struct BoolTerm;
using TermPtr = std::shared_ptr<const Term>;
using BoolPtr = std::shared_ptr<const BoolTerm>;

/// The T,U subscripts carried by pairing and projection terms.
struct ProdTypes {
  Type left;
  Type right;
  friend bool operator==(const ProdTypes&, const ProdTypes&) = default;
};

namespace node {

struct Var {
  std::string name;
};
struct Const {
  double value;
};
struct Add {
  TermPtr lhs, rhs;
};
struct PrimApp {
  std::string op;
  TermPtr arg;
};
struct Let {
  std::string var;
  Type type;
  TermPtr bound, body;
};
struct UnitVal {};
struct Pair {
  std::optional<ProdTypes> types;
  TermPtr first, second;
};
struct Fst {
  std::optional<ProdTypes> types;
  TermPtr arg;
};
struct Snd {
  std::optional<ProdTypes> types;
  TermPtr arg;
};
struct If {
  BoolPtr cond;
  TermPtr then_branch, else_branch;
};
struct LetRec {
  std::string fn, param;
  Type param_type, result_type;
  TermPtr body, scope;
};
struct FunApp {
  std::string fn;
  TermPtr arg;
};
/// rd(var:type. body)(at)(cotangent)
struct Rd {
  std::string var;
  Type type;
  TermPtr body, at, cotangent;
};

struct True {};
struct False {};
struct PredApp {
  std::string pred;
  TermPtr arg;
};

}  // namespace node

using TermNode = std::variant<node::Var, node::Const, node::Add, node::PrimApp, node::Let, node::UnitVal,
                              node::Pair, node::Fst, node::Snd, node::If, node::LetRec, node::FunApp,
                              node::Rd>;
using BoolNode = std::variant<node::True, node::False, node::PredApp>;

/// Immutable term node. Build through the `mk` functions, which also
/// maintain the cached syntactic-class flags.
struct Term {
  TermNode node;
  Span span;
  /// Generated by the value grammar (x | r | * | <V,W>).
  bool is_value = false;
  /// A value with no variables.
  bool is_ground = false;
  /// Generated by the trace grammar: no if, letrec, application or rd.
  bool is_trace = false;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

struct BoolTerm {
  BoolNode node;
  Span span;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
};

namespace mk {

TermPtr var(std::string name, Span span = {});
TermPtr constant(double value, Span span = {});
TermPtr add(TermPtr lhs, TermPtr rhs, Span span = {});
TermPtr prim(std::string op, TermPtr arg, Span span = {});
TermPtr let(std::string var, Type type, TermPtr bound, TermPtr body, Span span = {});
TermPtr unit(Span span = {});
TermPtr pair(TermPtr first, TermPtr second, std::optional<ProdTypes> types = std::nullopt, Span span = {});
TermPtr fst(TermPtr arg, std::optional<ProdTypes> types = std::nullopt, Span span = {});
TermPtr snd(TermPtr arg, std::optional<ProdTypes> types = std::nullopt, Span span = {});
TermPtr cond(BoolPtr cond, TermPtr then_branch, TermPtr else_branch, Span span = {});
TermPtr letrec(std::string fn, std::string param, Type param_type, Type result_type, TermPtr body,
               TermPtr scope, Span span = {});
TermPtr app(std::string fn, TermPtr arg, Span span = {});
TermPtr rd(std::string var, Type type, TermPtr body, TermPtr at, TermPtr cotangent, Span span = {});
/// M * N, i.e. mul(<M, N>).
TermPtr mul(TermPtr lhs, TermPtr rhs, Span span = {});

BoolPtr truth(bool value, Span span = {});
BoolPtr pred(std::string name, TermPtr arg, Span span = {});

}  // namespace mk

/// A term of the value grammar. Values may be open: free variables are the
/// differentiation variables of enclosing rd terms.
class Value {
 public:
  static Value var(std::string name);
  static Value real(double r);
  static Value unit();
  /// Closed components get their decoration computed when none is given.
  static Value pair(const Value& first, const Value& second, std::optional<ProdTypes> types = std::nullopt);
  static std::optional<Value> from_term(TermPtr term);

  const TermPtr& term() const { return term_; }
  bool closed() const { return term_->is_ground; }

  bool is_var() const { return term_->as<node::Var>() != nullptr; }
  bool is_real() const { return term_->as<node::Const>() != nullptr; }
  bool is_unit() const { return term_->as<node::UnitVal>() != nullptr; }
  bool is_pair() const { return term_->as<node::Pair>() != nullptr; }

  const std::string& var_name() const;
  double as_real() const;
  Value first() const;
  Value second() const;

 private:
  explicit Value(TermPtr term) : term_(std::move(term)) {}
  TermPtr term_;
};

/// Bit-exact structural equality of values (decorations ignored).
bool same_value(const Value& a, const Value& b);

/// A term of the trace grammar: variables, constants, +, op, let, unit,
/// pairs and projections. The factories only accept trace children, so a
/// TraceTerm cannot contain conditionals, definitions, calls or rd.
class TraceTerm {
 public:
  static TraceTerm var(std::string name);
  static TraceTerm constant(double r);
  static TraceTerm add(const TraceTerm& lhs, const TraceTerm& rhs);
  static TraceTerm prim(std::string op, const TraceTerm& arg);
  static TraceTerm let(std::string var, Type type, const TraceTerm& bound, const TraceTerm& body);
  static TraceTerm unit();
  static TraceTerm pair(const TraceTerm& first, const TraceTerm& second, std::optional<ProdTypes> types);
  static TraceTerm fst(const TraceTerm& arg, std::optional<ProdTypes> types);
  static TraceTerm snd(const TraceTerm& arg, std::optional<ProdTypes> types);
  static TraceTerm from_value(const Value& v) { return TraceTerm(v.term()); }
  static std::optional<TraceTerm> from_term(TermPtr term);

  const TermPtr& term() const { return term_; }

 private:
  explicit TraceTerm(TermPtr term) : term_(std::move(term)) {}
  TermPtr term_;
};

/// Source of fresh ordinary variable names. Names look like "%17"; the
/// surface grammar only produces such names when re-reading printed
/// traces, and those are registered through `avoid`.
class VarSupply {
 public:
  explicit VarSupply(std::string prefix = "%") : prefix_(std::move(prefix)) {}

  std::string fresh();
  void avoid(const std::string& name);
  /// Avoids every identifier occurring in `term`.
  void avoid_all(const TermPtr& term);

 private:
  std::string prefix_;
  std::uint64_t counter_ = 0;
  std::set<std::string> avoid_;
};

struct FreeVars {
  std::set<std::string> vars;
  std::set<std::string> funs;
};

FreeVars free_vars(const TermPtr& term);
FreeVars free_vars(const BoolPtr& term);

/// Equality up to renaming of bound variables. Pair/projection decorations
/// are compared only when both sides carry them.
bool alpha_equal(const TermPtr& a, const TermPtr& b);
bool alpha_equal(const BoolPtr& a, const BoolPtr& b);

/// Replaces free occurrences of the ordinary variable `from` by `to`.
/// `to` must not be bound anywhere in `term` (true for fresh names).
TermPtr rename_free(const TermPtr& term, const std::string& from, const std::string& to);

/// Every ordinary or function identifier occurring in the term, bound or free.
void collect_names(const TermPtr& term, std::set<std::string>& out);

/// Number of nodes in the term tree.
std::size_t term_size(const TermPtr& term);

}  // namespace dpl
