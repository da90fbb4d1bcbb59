#pragma once

#include <cstdint>
#include <random>

#include "dpl/ast.hpp"
#include "dpl/typecheck.hpp"

namespace dpl {

struct GenConfig {
  /// How many rd terms may be nested inside one another.
  int max_rd_nesting = 2;
  /// Depth budget of an rd body; kept small because the derivative of a
  /// trace grows exponentially with its let-nesting.
  int rd_body_depth = 2;
  /// Depth budget of function bodies.
  int fun_body_depth = 2;
  int max_functions = 2;
  bool allow_letrec = true;
  bool allow_rd = true;
  bool allow_if = true;
};

/// Uniform double in [lo, hi) from the top 53 bits of one draw.
double uniform(std::mt19937_64& rng, double lo, double hi);

/// A random type with between 1 and max_leaves leaves (unit counts as one).
Type gen_type(std::mt19937_64& rng, int max_leaves);

/// A closed value of type t with reals drawn uniformly from [lo, hi).
Value gen_value(std::mt19937_64& rng, const Type& t, double lo = -2.0, double hi = 2.0);

/// A random program M with Phi={} | gamma |- M : t, deterministic in the
/// seed. Constants come from continuous distributions, so guards sit on a
/// boundary with probability zero. Recursive functions follow the pattern
/// `if y <. c then base else let r = f(y + -1) in step` and are only called
/// on arguments of the form k * sin(M), which bounds the recursion depth.
/// The result is undecorated; run it through infer_term.
TermPtr gen_program(std::uint64_t seed, const TypeEnv& gamma, const Type& t, int depth, const GenConfig& cfg = {});

}  // namespace dpl
