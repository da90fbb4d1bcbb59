#pragma once

#include <string>

#include "dpl/ast.hpp"

namespace dpl {

/// Shortest round-tripping decimal; infinities print as 1e999 / -1e999.
std::string format_real(double r);

/// Canonical concrete syntax. The output parses back to an alpha-equal
/// term (pair and projection decorations are not printed).
std::string print_term(const TermPtr& m);
std::string print_bool(const BoolPtr& b);
inline std::string print_value(const Value& v) { return print_term(v.term()); }
inline std::string print_trace(const TraceTerm& c) { return print_term(c.term()); }

}  // namespace dpl
