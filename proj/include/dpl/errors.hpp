#pragma once

#include <stdexcept>
#include <string>

#include "dpl/ast.hpp"

namespace dpl {

/// A primitive was applied outside its domain. This is the semantic
/// "undefined" of the language, not a crash.
class Stuck : public std::runtime_error {
 public:
  Stuck(std::string primitive, Value argument);

  const std::string& primitive() const { return primitive_; }
  const Value& argument() const { return argument_; }

 private:
  std::string primitive_;
  Value argument_;
};

/// The step budget ran out before evaluation finished.
class FuelExhausted : public std::runtime_error {
 public:
  FuelExhausted() : std::runtime_error("fuel exhausted") {}
};

/// A broken machine invariant. Never expected on well-typed input.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class TypeError : public std::runtime_error {
 public:
  enum class Kind {
    UnboundVariable,
    UnboundFunction,
    TypeMismatch,
    GlobalVariableInFunctionBody,
    ArityMismatch,
    UnknownPrimitive,
    ValueNotClosed,
  };

  TypeError(Kind kind, std::string message, Span span = {});

  Kind kind() const { return kind_; }
  Span span() const { return span_; }

 private:
  Kind kind_;
  Span span_;
};

const char* to_string(TypeError::Kind kind);

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(std::string message, int line, int column);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace dpl
