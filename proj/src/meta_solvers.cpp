#include "metasolve/meta_solvers.hpp"

#include <algorithm>
#include <cmath>

#include "metasolve/game_core.hpp"
#include "metasolve/lp.hpp"

namespace metasolve {

JointProfile solve_nash_zero_sum(const PayoffMatrix& m, double epsilon) {
  if (!m.zero_sum()) throw std::invalid_argument("solve_nash_zero_sum: matrix is not zero-sum");
  if (epsilon <= 0) throw std::invalid_argument("solve_nash_zero_sum: epsilon must be positive");
  JointProfile p{MixedStrategy{lp::maximin_strategy(m.p1())},
                 MixedStrategy{lp::maximin_strategy(Matrix(-m.p1().transpose()))}};
  const double achieved = exploitability(m, p);
  if (achieved > epsilon)
    throw ConvergenceError("nash solver missed the exploitability bound", achieved);
  return p;
}

MixedStrategy solve_uniform(int population_size) {
  if (population_size < 1) throw std::invalid_argument("solve_uniform: empty population");
  return MixedStrategy::uniform(population_size);
}

MixedStrategy solve_self_play(int population_size) {
  if (population_size < 1) throw std::invalid_argument("solve_self_play: empty population");
  return MixedStrategy::pure(population_size, population_size - 1);
}

ResponseGraph build_response_graph(const PayoffMatrix& m, bool symmetric_single_population) {
  ResponseGraph g;
  g.rows = static_cast<int>(m.rows());
  g.cols = static_cast<int>(m.cols());
  if (symmetric_single_population) {
    if (!m.antisymmetric())
      throw std::invalid_argument(
          "build_response_graph: single-population mode needs an antisymmetric square matrix");
    g.single_population = true;
    g.num_nodes = g.rows;
    g.out_edges.assign(g.num_nodes, {});
    for (int i = 0; i < g.rows; ++i)
      for (int j = 0; j < g.rows; ++j)
        if (j != i && m.p1()(j, i) > 0) g.out_edges[i].push_back(j);
    return g;
  }
  g.single_population = false;
  g.num_nodes = g.rows * g.cols;
  g.out_edges.assign(g.num_nodes, {});
  const Matrix& a = m.p1();
  const Matrix b = m.p2();
  for (int i = 0; i < g.rows; ++i) {
    for (int j = 0; j < g.cols; ++j) {
      const int node = i * g.cols + j;
      for (int i2 = 0; i2 < g.rows; ++i2)
        if (i2 != i && a(i2, j) > a(i, j)) g.out_edges[node].push_back(i2 * g.cols + j);
      for (int j2 = 0; j2 < g.cols; ++j2)
        if (j2 != j && b(i, j2) > b(i, j)) g.out_edges[node].push_back(i * g.cols + j2);
    }
  }
  return g;
}

std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> components;
  int counter = 0;

  // Iterative Tarjan.
  struct Frame {
    int node;
    std::size_t next;
  };
  std::vector<Frame> frames;
  for (int start = 0; start < n; ++start) {
    if (index[start] >= 0) continue;
    frames.push_back({start, 0});
    index[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.next < adjacency[f.node].size()) {
        const int w = adjacency[f.node][f.next++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.node] = std::min(low[f.node], index[w]);
        }
      } else {
        if (low[f.node] == index[f.node]) {
          std::vector<int> comp;
          for (;;) {
            const int w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp.push_back(w);
            if (w == f.node) break;
          }
          std::sort(comp.begin(), comp.end());
          components.push_back(std::move(comp));
        }
        const int done = f.node;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().node] = std::min(low[frames.back().node], low[done]);
      }
    }
  }
  return components;
}

namespace {

std::vector<std::vector<int>> sink_components(const ResponseGraph& g) {
  const auto comps = strongly_connected_components(g.out_edges);
  std::vector<int> comp_of(g.num_nodes, -1);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (int v : comps[c]) comp_of[v] = static_cast<int>(c);
  std::vector<bool> has_out(comps.size(), false);
  for (int v = 0; v < g.num_nodes; ++v)
    for (int w : g.out_edges[v])
      if (comp_of[w] != comp_of[v]) has_out[comp_of[v]] = true;
  std::vector<std::vector<int>> sinks;
  for (std::size_t c = 0; c < comps.size(); ++c)
    if (!has_out[c]) sinks.push_back(comps[c]);
  std::sort(sinks.begin(), sinks.end());
  return sinks;
}

// Fixation probability of a mutant whose payoff advantage is d, logistic
// selection with intensity alpha in a population of size m.
double fixation_probability(double d, double alpha, int m) {
  const double x = alpha * d;
  if (std::abs(x) < 1e-14) return 1.0 / m;
  if (x < -36.0) return std::exp((m - 1) * x);  // underflows safely to 0
  const double num = -std::expm1(-x);
  const double den = -std::expm1(-static_cast<double>(m) * x);
  return num / den;
}

}  // namespace

std::vector<std::vector<int>> find_sscc_bruteforce(const PayoffMatrix& m) {
  return sink_components(build_response_graph(m, true));
}

Matrix alpha_rank_transition(const PayoffMatrix& m, double alpha, int population_m) {
  if (alpha < 0) throw std::invalid_argument("alpha_rank: alpha must be >= 0");
  if (population_m < 2) throw std::invalid_argument("alpha_rank: population_m must be >= 2");
  if (!m.antisymmetric())
    throw std::invalid_argument("alpha_rank: needs an antisymmetric square matrix");
  const int n = static_cast<int>(m.rows());
  const Matrix& g = m.p1();
  Matrix c = Matrix::Zero(n, n);
  if (n == 1) {
    c(0, 0) = 1.0;
    return c;
  }
  for (int i = 0; i < n; ++i) {
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = g(j, i) - g(i, j);
      const double rho = fixation_probability(d, alpha, population_m);
      c(i, j) = rho / (n - 1);
      total += c(i, j);
    }
    c(i, i) = 1.0 - total;
  }
  // Uniform mutation floor keeps the chain ergodic.
  const double eta = 1e-10;
  c = ((1.0 - eta) * c).eval();
  c.array() += eta / n;
  return c;
}

AlphaRankResult alpha_rank(const PayoffMatrix& m, double alpha, int population_m) {
  const Matrix c = alpha_rank_transition(m, alpha, population_m);
  const ResponseGraph graph = build_response_graph(m, true);
  const int n = graph.num_nodes;
  AlphaRankResult result;
  result.sscc = sink_components(graph);
  if (n == 1) {
    result.stationary = Vector::Ones(1);
    return result;
  }

  // Stationary distribution: solve pi^T C = pi^T with sum(pi) = 1.
  Matrix a = c.transpose() - Matrix::Identity(n, n);
  a.row(n - 1).setOnes();
  Vector b = Vector::Zero(n);
  b[n - 1] = 1.0;
  Vector pi = a.fullPivLu().solve(b);
  pi = pi.cwiseMax(0.0);
  pi /= pi.sum();
  result.stationary = pi;
  return result;
}

}  // namespace metasolve
