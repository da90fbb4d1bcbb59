#include "dpl/jet.hpp"

#include <algorithm>
#include <cmath>

namespace dpl {

Jet Jet::make(std::uint32_t tag, Jet primal, Jet tangent) {
  if (tag == 0) return primal;
  Jet j;
  j.tag_ = tag;
  j.parts_ = std::make_shared<const std::pair<Jet, Jet>>(std::move(primal), std::move(tangent));
  return j;
}

std::pair<Jet, Jet> Jet::split(std::uint32_t tag) const {
  if (tag_ == tag && tag != 0) return {primal(), tangent()};
  return {*this, Jet(0.0)};
}

double Jet::real() const {
  const Jet* j = this;
  while (j->tag_ != 0) j = &j->primal();
  return j->value_;
}

namespace {

std::uint32_t top(const Jet& a, const Jet& b) { return std::max(a.tag(), b.tag()); }

}  // namespace

Jet operator+(const Jet& a, const Jet& b) {
  std::uint32_t t = top(a, b);
  if (t == 0) return Jet(a.value() + b.value());
  auto [ap, at] = a.split(t);
  auto [bp, bt] = b.split(t);
  return Jet::make(t, ap + bp, at + bt);
}

Jet operator-(const Jet& a) {
  if (a.tag() == 0) return Jet(-a.value());
  return Jet::make(a.tag(), -a.primal(), -a.tangent());
}

Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

Jet operator*(const Jet& a, const Jet& b) {
  std::uint32_t t = top(a, b);
  if (t == 0) return Jet(a.value() * b.value());
  auto [ap, at] = a.split(t);
  auto [bp, bt] = b.split(t);
  return Jet::make(t, ap * bp, ap * bt + at * bp);
}

Jet operator/(const Jet& a, const Jet& b) {
  std::uint32_t t = top(a, b);
  if (t == 0) return Jet(a.value() / b.value());
  auto [ap, at] = a.split(t);
  auto [bp, bt] = b.split(t);
  Jet q = ap / bp;
  return Jet::make(t, q, (at - q * bt) / bp);
}

Jet exp(const Jet& a) {
  if (a.tag() == 0) return Jet(std::exp(a.value()));
  Jet e = exp(a.primal());
  return Jet::make(a.tag(), e, e * a.tangent());
}

Jet log(const Jet& a) {
  if (a.tag() == 0) return Jet(std::log(a.value()));
  return Jet::make(a.tag(), log(a.primal()), a.tangent() / a.primal());
}

Jet sin(const Jet& a) {
  if (a.tag() == 0) return Jet(std::sin(a.value()));
  return Jet::make(a.tag(), sin(a.primal()), cos(a.primal()) * a.tangent());
}

Jet cos(const Jet& a) {
  if (a.tag() == 0) return Jet(std::cos(a.value()));
  return Jet::make(a.tag(), cos(a.primal()), -(sin(a.primal()) * a.tangent()));
}

std::uint32_t max_tag(std::span<const Jet> xs) {
  std::uint32_t t = 0;
  for (const auto& x : xs) t = std::max(t, x.tag());
  return t;
}

JetFn reverse_of(JetFn f, std::size_t n, std::size_t m) {
  return [f = std::move(f), n, m](std::span<const Jet> in) {
    std::span<const Jet> x = in.first(n);
    std::span<const Jet> w = in.subspan(n, m);
    std::uint32_t tag = max_tag(in) + 1;
    std::vector<Jet> out;
    out.reserve(n);
    std::vector<Jet> probe(x.begin(), x.end());
    for (std::size_t j = 0; j < n; ++j) {
      probe[j] = Jet::make(tag, x[j], Jet(1.0));
      std::vector<Jet> y = f(probe);
      probe[j] = x[j];
      Jet acc(0.0);
      for (std::size_t i = 0; i < m; ++i) acc = acc + y[i].split(tag).second * w[i];
      out.push_back(acc);
    }
    return out;
  };
}

}  // namespace dpl
