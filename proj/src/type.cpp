#include "dpl/type.hpp"

#include <stdexcept>

namespace dpl {

struct Type::Parts {
  Type left;
  Type right;
  std::size_t size;
};

Type::Type() : kind_(Kind::Unit) {}

Type::Type(Kind kind, std::shared_ptr<const Parts> parts) : kind_(kind), parts_(std::move(parts)) {}

Type Type::real() { return Type(Kind::Real, nullptr); }

Type Type::unit() { return Type(Kind::Unit, nullptr); }

Type Type::prod(Type left, Type right) {
  std::size_t size = left.size() + right.size();
  return Type(Kind::Prod, std::make_shared<const Parts>(Parts{std::move(left), std::move(right), size}));
}

Type Type::real_power(std::size_t n) {
  if (n == 0) return unit();
  Type t = real();
  for (std::size_t i = 1; i < n; ++i) t = prod(t, real());
  return t;
}

Type Type::iterated(std::span<const Type> parts) {
  if (parts.empty()) return unit();
  Type t = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) t = prod(t, parts[i]);
  return t;
}

const Type& Type::left() const {
  if (kind_ != Kind::Prod) throw std::logic_error("Type::left on non-product " + str());
  return parts_->left;
}

const Type& Type::right() const {
  if (kind_ != Kind::Prod) throw std::logic_error("Type::right on non-product " + str());
  return parts_->right;
}

std::size_t Type::size() const {
  switch (kind_) {
    case Kind::Real:
      return 1;
    case Kind::Unit:
      return 0;
    case Kind::Prod:
      return parts_->size;
  }
  return 0;
}

std::string Type::str() const {
  switch (kind_) {
    case Kind::Real:
      return "real";
    case Kind::Unit:
      return "unit";
    case Kind::Prod: {
      if (std::size_t n = real_power_exponent(*this); n > 1) return "real^" + std::to_string(n);
      std::string r = right().str();
      if (right().is_prod() && real_power_exponent(right()) <= 1) r = "(" + r + ")";
      return left().str() + " * " + r;
    }
  }
  return "?";
}

bool operator==(const Type& a, const Type& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ != Type::Kind::Prod) return true;
  if (a.parts_ == b.parts_) return true;
  return a.size() == b.size() && a.left() == b.left() && a.right() == b.right();
}

std::size_t real_power_exponent(const Type& t) {
  std::size_t n = 0;
  const Type* cur = &t;
  while (cur->is_prod()) {
    if (!cur->right().is_real()) return 0;
    ++n;
    cur = &cur->left();
  }
  return cur->is_real() ? n + 1 : 0;
}

}  // namespace dpl
