#pragma once

#include <vector>

#include "metasolve/types.hpp"

namespace metasolve {

// Directed improvement graph. In single-population mode nodes are strategies
// of a symmetric zero-sum game and i -> j exists iff M(j, i) > 0 strictly.
// In two-population mode nodes are profile pairs (i, j) indexed i * cols + j
// and edges are strict unilateral improvements.
struct ResponseGraph {
  int num_nodes = 0;
  bool single_population = true;
  int rows = 0;
  int cols = 0;
  std::vector<std::vector<int>> out_edges;
};

struct AlphaRankResult {
  Vector stationary;
  std::vector<std::vector<int>> sscc;
};

// Two-player zero-sum Nash via the minimax linear program (deterministic
// pivoting). Throws ConvergenceError carrying the achieved exploitability if
// the epsilon contract cannot be met.
JointProfile solve_nash_zero_sum(const PayoffMatrix& m, double epsilon);

MixedStrategy solve_uniform(int population_size);

// Point mass on the most recently added strategy.
MixedStrategy solve_self_play(int population_size);

ResponseGraph build_response_graph(const PayoffMatrix& m, bool symmetric_single_population);

// Single-population evolutionary chain over the strategies of a symmetric
// zero-sum game: logistic copy probabilities with selection intensity
// `alpha`, finite population `population_m`, and a uniform 1e-10 mutation
// floor guaranteeing ergodicity. The SSCC list is the combinatorial
// infinite-alpha answer.
AlphaRankResult alpha_rank(const PayoffMatrix& m, double alpha, int population_m);

// The row-stochastic evolutionary transition matrix underlying alpha_rank
// (mutation floor included); alpha_rank's stationary vector is its left
// fixed point.
Matrix alpha_rank_transition(const PayoffMatrix& m, double alpha, int population_m);

// Exact sink strongly-connected components of the single-population
// response graph.
std::vector<std::vector<int>> find_sscc_bruteforce(const PayoffMatrix& m);

// Tarjan SCCs of an adjacency list (exposed for tests).
std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& adjacency);

}  // namespace metasolve
