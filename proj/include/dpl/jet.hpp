#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace dpl {

/// A nested dual number. Tag 0 is a plain real; a jet with tag k > 0 is
/// primal + tangent * e_k where both parts only carry tags below k. Distinct
/// tags keep nested derivatives apart, so derivatives of any order are exact
/// up to floating-point rounding.
class Jet {
 public:
  Jet(double v = 0.0) : value_(v) {}  // NOLINT(google-explicit-constructor)
  static Jet make(std::uint32_t tag, Jet primal, Jet tangent);

  std::uint32_t tag() const { return tag_; }
  /// Plain value; only valid when tag() == 0.
  double value() const { return value_; }
  const Jet& primal() const { return parts_->first; }
  const Jet& tangent() const { return parts_->second; }

  /// Primal and tangent with respect to `tag` (tangent 0 if absent).
  std::pair<Jet, Jet> split(std::uint32_t tag) const;

  /// Innermost real value.
  double real() const;

 private:
  double value_ = 0.0;
  std::uint32_t tag_ = 0;
  std::shared_ptr<const std::pair<Jet, Jet>> parts_;
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);

using JetFn = std::function<std::vector<Jet>(std::span<const Jet>)>;

std::uint32_t max_tag(std::span<const Jet> xs);

/// Given f : R^n -> R^m, returns g : R^n x R^m -> R^n with
/// g(x, w) = J_f(x)^T w, computed by one tagged forward pass per input.
JetFn reverse_of(JetFn f, std::size_t n, std::size_t m);

}  // namespace dpl
