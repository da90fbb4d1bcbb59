#pragma once

#include <string>
#include <utility>

#include "dpl/ast.hpp"
#include "dpl/errors.hpp"
#include "dpl/persistent_map.hpp"
#include "dpl/primitives.hpp"

namespace dpl {

using TypeEnv = PersistentMap<std::string, Type>;

struct FunType {
  Type arg;
  Type result;
};
using FunTypeEnv = PersistentMap<std::string, FunType>;

struct Typed {
  Type type;
  /// Copy of the input with every pair and projection decorated.
  TermPtr term;
};

/// Phi | Gamma |- M : T. Throws TypeError.
Typed infer_term(const FunTypeEnv& phi, const TypeEnv& gamma, const TermPtr& m,
                 const Registry& reg = Registry::builtin());

BoolPtr infer_bool(const FunTypeEnv& phi, const TypeEnv& gamma, const BoolPtr& b,
                   const Registry& reg = Registry::builtin());

/// Type of a closed value; throws TypeError(ValueNotClosed) on a variable.
Type type_of_closed_value(const Value& v);

}  // namespace dpl
