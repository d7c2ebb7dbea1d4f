#pragma once

#include "metasolve/types.hpp"

namespace metasolve {

struct HullQuery {
  Matrix rows;       // existing payoff vectors, one per row
  Vector candidate;  // point to test
};

// Euclidean distance from the candidate to the convex hull of the rows,
// computed by Wolfe's minimum-norm-point algorithm (finite termination).
double hull_distance(const HullQuery& q);

// True iff the candidate is within tol of some convex combination of the
// rows.
bool hull_contains(const HullQuery& q, double tol = 1e-7);

// True iff the added row falls outside the hull of the existing rows, i.e.
// the gamescape grew.
bool verify_enlargement(const Matrix& before, const Vector& added, double tol = 1e-7);

}  // namespace metasolve
