#pragma once

#include <functional>
#include <string>

#include "dpl/ast.hpp"
#include "dpl/primitives.hpp"

namespace dpl {

/// Symbolic reverse derivative of x:T |-> C at V, applied to W.
///
/// C must be fully decorated (the output of type checking or of symbolic
/// evaluation of a checked program). Binders of C that would capture, or
/// that clash with x or the free variables of V and W, are renamed to fresh
/// names on the fly. `tick` is called once per clause application.
///
/// Throws InternalError when x occurs free in W, or in V other than as V = x.
TraceTerm rdiff(const std::string& x, const Type& t, const TraceTerm& c, const Value& v, const Value& w,
                VarSupply& supply, const std::function<void()>& tick = {},
                const Registry& reg = Registry::builtin());

}  // namespace dpl
