#pragma once

#include "metasolve/types.hpp"

namespace metasolve {

struct BestResponse {
  Eigen::Index index;
  double value;
};

// Expected payoff to `player` (1 or 2) under a joint mixed profile.
double expected_payoff(const PayoffMatrix& g, const JointProfile& p, int player = 1);

// Pure best response of `player` against the opponent's mixed strategy.
// Ties are broken by the lowest strategy index.
BestResponse best_response(const PayoffMatrix& g, const MixedStrategy& opponent, int player);

// Sum over players of best-response gain over the achieved payoff. Zero
// exactly at a Nash equilibrium; never negative.
double exploitability(const PayoffMatrix& g, const JointProfile& p);

// Best-response gain of the given player only.
double exploitability_term(const PayoffMatrix& g, const JointProfile& p, int player);

}  // namespace metasolve
