#pragma once

#include <string_view>

#include "dpl/ast.hpp"
#include "dpl/primitives.hpp"

namespace dpl {

/// Parses a whole program. Sugar (subtraction, `*`, tuple-let, `let f(x)`,
/// grad, fd, infix dotted comparisons, real^n) is elaborated here; names
/// introduced by elaboration are fresh with respect to the source text.
/// Throws SyntaxError.
TermPtr parse_term(std::string_view text, const Registry& reg = Registry::builtin());
BoolPtr parse_bool(std::string_view text, const Registry& reg = Registry::builtin());
Type parse_type(std::string_view text);

}  // namespace dpl
