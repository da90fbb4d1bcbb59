#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

namespace dpl {

/// Types of the language: real, unit and binary products.
///
/// Iterated products associate to the left: T0 x T1 x T2 is (T0 x T1) x T2,
/// the empty product is unit and the singleton product is its component.
class Type {
 public:
  enum class Kind : std::uint8_t { Real, Unit, Prod };

  /// Defaults to unit.
  Type();

  static Type real();
  static Type unit();
  static Type prod(Type left, Type right);
  /// real^n as a left-nested iterated product.
  static Type real_power(std::size_t n);
  static Type iterated(std::span<const Type> parts);

  Kind kind() const { return kind_; }
  bool is_real() const { return kind_ == Kind::Real; }
  bool is_unit() const { return kind_ == Kind::Unit; }
  bool is_prod() const { return kind_ == Kind::Prod; }

  const Type& left() const;
  const Type& right() const;

  /// Number of real leaves, i.e. the dimension of the type's denotation.
  std::size_t size() const;

  /// Canonical surface rendering, e.g. "real * (real * unit)".
  std::string str() const;

  friend bool operator==(const Type& a, const Type& b);

 private:
  struct Parts;
  Type(Kind kind, std::shared_ptr<const Parts> parts);

  Kind kind_;
  std::shared_ptr<const Parts> parts_;
};

/// If `t` is real^n for some n >= 1, returns n; otherwise 0.
std::size_t real_power_exponent(const Type& t);

}  // namespace dpl
