#include "metasolve/game_core.hpp"

namespace metasolve {

double expected_payoff(const PayoffMatrix& g, const JointProfile& p, int player) {
  check_profile_shape(g, p);
  const double v1 = p.p1.probs.dot(g.p1() * p.p2.probs);
  if (player == 1) return v1;
  if (player != 2) throw std::invalid_argument("player must be 1 or 2");
  return g.zero_sum() ? -v1 : p.p1.probs.dot(g.p2() * p.p2.probs);
}

BestResponse best_response(const PayoffMatrix& g, const MixedStrategy& opponent, int player) {
  Vector values;
  if (player == 1) {
    if (opponent.size() != g.cols())
      throw std::invalid_argument("best_response: opponent does not match columns");
    values = g.p1() * opponent.probs;
  } else if (player == 2) {
    if (opponent.size() != g.rows())
      throw std::invalid_argument("best_response: opponent does not match rows");
    values = g.zero_sum() ? Vector(-g.p1().transpose() * opponent.probs)
                          : Vector(g.p2().transpose() * opponent.probs);
  } else {
    throw std::invalid_argument("player must be 1 or 2");
  }
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return {best, values[best]};
}

double exploitability_term(const PayoffMatrix& g, const JointProfile& p, int player) {
  check_profile_shape(g, p);
  const MixedStrategy& opp = (player == 1) ? p.p2 : p.p1;
  return best_response(g, opp, player).value - expected_payoff(g, p, player);
}

double exploitability(const PayoffMatrix& g, const JointProfile& p) {
  return exploitability_term(g, p, 1) + exploitability_term(g, p, 2);
}

}  // namespace metasolve
