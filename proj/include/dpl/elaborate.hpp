#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dpl/ast.hpp"

namespace dpl {

/// 0_T: zero at real, () at unit, pairs of zeros at products.
Value zero_of_type(const Type& t);

/// M +_T N. Only real has a primitive sum; the other cases are spelled
/// out with lets so both summands are always evaluated.
TermPtr add_at_type(const Type& t, TermPtr m, TermPtr n, VarSupply& supply);
TraceTerm add_at_type(const Type& t, const TraceTerm& m, const TraceTerm& n, VarSupply& supply);

using Binding = std::pair<std::string, Type>;

/// let <x0:T0, ..., xn:Tn> = M in N over the left-nested product.
/// Throws std::invalid_argument on a repeated binder name.
TermPtr elab_tuple_let(const std::vector<Binding>& bindings, TermPtr m, TermPtr n, VarSupply& supply);
TraceTerm elab_tuple_let(const std::vector<Binding>& bindings, const TraceTerm& m, const TraceTerm& n,
                         VarSupply& supply);

/// grad(x:real^n. N)(L) = rd(x:real^n. N)(L)(1)
TermPtr elab_grad(const std::string& x, std::size_t n, TermPtr body, TermPtr at);

/// fd(x:T. N)(U, L)(M) = rd(y:U. rd(x:T. N)(L)(y))(0_U)(M), y fresh.
TermPtr elab_fd(const std::string& x, const Type& t, TermPtr body, const Type& u, TermPtr at, TermPtr tangent,
                VarSupply& supply);

}  // namespace dpl
