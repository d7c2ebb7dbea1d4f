#pragma once

#include "metasolve/types.hpp"

namespace metasolve::lp {

struct Result {
  bool feasible = false;
  bool bounded = true;
  Vector x;
  double objective = 0.0;
};

// Minimize c^T x subject to A x = b, x >= 0, via two-phase tableau simplex
// with Bland's rule (deterministic, cycle-free).
Result solve_standard(Matrix a, Vector b, Vector c);

// Optimal mixed strategy for the row player of the zero-sum matrix m
// (maximizes the minimum expected payoff over opponent columns).
Vector maximin_strategy(const Matrix& m);

}  // namespace metasolve::lp
