#include "dpl/errors.hpp"

#include "dpl/printer.hpp"

namespace dpl {

namespace {

std::string format_point(const Value& v) {
  if (v.is_real()) return format_real(v.as_real());
  if (v.is_unit()) return "()";
  if (v.is_var()) return v.var_name();
  return "(" + format_point(v.first()) + ", " + format_point(v.second()) + ")";
}

}  // namespace

Stuck::Stuck(std::string primitive, Value argument)
    : std::runtime_error("undefined: " + primitive + " at " + format_point(argument)),
      primitive_(std::move(primitive)),
      argument_(std::move(argument)) {}

TypeError::TypeError(Kind kind, std::string message, Span span)
    : std::runtime_error(std::move(message)), kind_(kind), span_(span) {}

const char* to_string(TypeError::Kind kind) {
  switch (kind) {
    case TypeError::Kind::UnboundVariable:
      return "UnboundVariable";
    case TypeError::Kind::UnboundFunction:
      return "UnboundFunction";
    case TypeError::Kind::TypeMismatch:
      return "TypeMismatch";
    case TypeError::Kind::GlobalVariableInFunctionBody:
      return "GlobalVariableInFunctionBody";
    case TypeError::Kind::ArityMismatch:
      return "ArityMismatch";
    case TypeError::Kind::UnknownPrimitive:
      return "UnknownPrimitive";
    case TypeError::Kind::ValueNotClosed:
      return "ValueNotClosed";
  }
  return "?";
}

SyntaxError::SyntaxError(std::string message, int line, int column)
    : std::runtime_error(std::move(message)), line_(line), column_(column) {}

}  // namespace dpl
