#pragma once

#include <cstdint>
#include <vector>

#include "metasolve/games.hpp"
#include "metasolve/types.hpp"

namespace metasolve {

struct OracleConfig {
  double tau = 1.0;
  int max_iters = 500;
  double step_size = 0.1;
  int restarts = 5;
  double tolerance = 1e-6;
  double perturbation_std = 0.1;  // zero-order only
  int perturbation_count = 32;    // zero-order only
  double init_noise = 1.5;        // restart spread around population anchors
  std::uint64_t seed = 0;
  // The restart-agreement alarm assumes the objective has a unique optimum;
  // see the restart_spread field of the results for the measured spread.
  bool alarm_on_restart_disagreement = false;
  bool allow_finite_difference = false;

  void validate() const {
    if (tau < 0) throw std::invalid_argument("OracleConfig: tau must be >= 0");
    if (max_iters < 1 || restarts < 1)
      throw std::invalid_argument("OracleConfig: iteration counts must be >= 1");
    if (step_size <= 0 || tolerance <= 0 || perturbation_std <= 0 || perturbation_count < 1)
      throw std::invalid_argument("OracleConfig: positive fields must be strictly positive");
  }
};

// Result of a mixed-strategy oracle over a simplex.
struct OracleResult {
  MixedStrategy strategy;
  double objective_value = 0.0;
  bool converged = true;
  double restart_spread = 0.0;  // max - min objective across random restarts
};

// Result of a direct search over pure candidates.
struct SelectionResult {
  int index = -1;
  double score = 0.0;
};

// Result of a parameter-space oracle.
struct ThetaOracleResult {
  Vector theta;
  double objective_value = 0.0;
  bool converged = true;
  double restart_spread = 0.0;
};

// Exact pure best response (epsilon = 0) to the opponent mixed strategy;
// `payoff` is the acting player's view: rows = own pure strategies,
// columns = opponent pure strategies.
OracleResult epsilon_br_oracle(const Matrix& payoff, const MixedStrategy& opponent,
                               double epsilon);

// Payoff term plus tau times the diversity of the population rows with the
// candidate row pi^T payoff appended.
double diverse_br_objective(const Matrix& payoff, const Vector& opponent,
                            const Eigen::Ref<const Matrix>& pop_rows, double tau,
                            const Vector& pi);

// Maximizes diverse_br_objective over the simplex by projected-gradient
// ascent from cfg.restarts random starts plus a polish run from the best
// pure vertex; returns the best point found.
OracleResult diverse_br_oracle(const Matrix& payoff, const MixedStrategy& opponent,
                               const Eigen::Ref<const Matrix>& pop_rows,
                               const OracleConfig& cfg);

// Direct search of the same objective over pure strategies.
SelectionResult diverse_br_pure_search(const Matrix& payoff, const Vector& opponent,
                                       const Eigen::Ref<const Matrix>& pop_rows, double tau);

// argmax_c sum_s nash(s) * max(payoff(c, s), 0); ties to the lowest index.
// Rows of candidate_payoffs are candidates, columns opponent population
// members weighted by `nash`.
SelectionResult rectified_oracle(const Matrix& candidate_payoffs, const Vector& nash);

// Preference-based best-response scores: for each candidate row c of
// `payoff`, the probability that c outperforms an incumbent drawn from
// own_profile against an opponent drawn from opp_profile.
Vector pbr_scores(const Matrix& payoff, const Vector& opp_profile, const Vector& own_profile,
                  const std::vector<int>& candidates);

SelectionResult pbr_oracle(const Matrix& payoff, const Vector& opp_profile,
                           const Vector& own_profile, const std::vector<int>& candidates);

// Quality-diversity oracle: argmax over candidates of the expected
// cardinality of the qd_kernel over [own_pop rows; candidate row] restricted
// to opponent population columns, with qualities exp(PBR).
SelectionResult diverse_alpha_oracle(const Matrix& payoff, const Vector& opp_profile,
                                     const Vector& own_profile, const std::vector<int>& own_pop,
                                     const std::vector<int>& opp_pop,
                                     const std::vector<int>& candidates);

// Gradient ascent on theta of sum_s opp_meta(s) phi(theta, s) + tau *
// Diversity(own rows + candidate row). Restarts anchor at random population
// members. Requires an engine gradient unless finite differences are
// enabled in the config.
ThetaOracleResult diverse_gradient_oracle(const GameEngine& engine,
                                          const std::vector<Vector>& opp_pop,
                                          const Vector& opp_meta,
                                          const std::vector<Vector>& own_pop,
                                          const Matrix& own_rows, const OracleConfig& cfg);

// Same objective optimized with antithetic Gaussian perturbations instead of
// engine gradients.
ThetaOracleResult zero_order_oracle(const GameEngine& engine, const std::vector<Vector>& opp_pop,
                                    const Vector& opp_meta, const std::vector<Vector>& own_pop,
                                    const Matrix& own_rows, const OracleConfig& cfg);

// Objective shared by the two parameter-space oracles (exposed for tests).
double engine_oracle_objective(const GameEngine& engine, const std::vector<Vector>& opp_pop,
                               const Vector& opp_meta, const Matrix& own_rows, double tau,
                               const Vector& theta);

// Euclidean projection onto the probability simplex (sort-based, exact).
Vector project_to_simplex(const Vector& v);

}  // namespace metasolve
