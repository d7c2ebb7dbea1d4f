#include "metasolve/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "metasolve/diversity.hpp"
#include "metasolve/rng.hpp"

namespace metasolve {

namespace {

// Tr(I - (L + I)^{-1}) for the Gram kernel of [rows; w] without the PSD
// validation overhead (the kernel is a Gram matrix by construction).
double ec_rows_appended(const Eigen::Ref<const Matrix>& rows, const Vector& w) {
  const Eigen::Index k = rows.rows() + 1;
  Matrix a(k, w.size());
  if (rows.rows() > 0) a.topRows(rows.rows()) = rows;
  a.row(k - 1) = w.transpose();
  Matrix li = a * a.transpose() + Matrix::Identity(k, k);
  const Matrix inv = Eigen::LLT<Matrix>(li).solve(Matrix::Identity(k, k));
  return static_cast<double>(k) - inv.trace();
}

}  // namespace

Vector project_to_simplex(const Vector& v) {
  const Eigen::Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0;
  double theta = 0.0;
  int rho = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    css += u[k];
    const double t = (css - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0) {
      rho = static_cast<int>(k + 1);
      theta = t;
    }
  }
  (void)rho;
  return (v.array() - theta).cwiseMax(0.0);
}

OracleResult epsilon_br_oracle(const Matrix& payoff, const MixedStrategy& opponent,
                               double epsilon) {
  if (epsilon < 0) throw std::invalid_argument("epsilon_br_oracle: epsilon must be >= 0");
  if (opponent.size() != payoff.cols())
    throw std::invalid_argument("epsilon_br_oracle: opponent does not match payoff columns");
  const Vector values = payoff * opponent.probs;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  OracleResult r{MixedStrategy::pure(payoff.rows(), best), values[best], true, 0.0};
  return r;
}

double diverse_br_objective(const Matrix& payoff, const Vector& opponent,
                            const Eigen::Ref<const Matrix>& pop_rows, double tau,
                            const Vector& pi) {
  double value = pi.dot(payoff * opponent);
  if (tau > 0) value += tau * ec_rows_appended(pop_rows, payoff.transpose() * pi);
  return value;
}

namespace {

struct Ascent {
  Vector point;
  double objective;
};

// Projected-gradient ascent with per-iteration backtracking from the
// configured step (max 30 halvings).
Ascent ascend_simplex(const Matrix& payoff, const Vector& opp, const Eigen::Ref<const Matrix>& pop_rows,
                      double tau, const OracleConfig& cfg, Vector start) {
  Vector pi = project_to_simplex(start);
  double obj = diverse_br_objective(payoff, opp, pop_rows, tau, pi);
  const Vector payoff_grad = payoff * opp;
  const double stop = cfg.tolerance * 1e-2;
  for (int it = 0; it < cfg.max_iters; ++it) {
    Vector grad = payoff_grad;
    if (tau > 0) grad += tau * (payoff * diversity_gradient(pop_rows, payoff.transpose() * pi));
    const double gnorm = grad.norm();
    if (gnorm < 1e-14) break;
    const Vector dir = grad / gnorm;
    double s = cfg.step_size;
    Vector cand = project_to_simplex(pi + s * dir);
    double cobj = diverse_br_objective(payoff, opp, pop_rows, tau, cand);
    int halvings = 0;
    while (cobj < obj && halvings < 30 && s > 1e-12) {
      s *= 0.5;
      cand = project_to_simplex(pi + s * dir);
      cobj = diverse_br_objective(payoff, opp, pop_rows, tau, cand);
      ++halvings;
    }
    const double moved = cobj - obj;
    if (cobj >= obj) {
      pi = cand;
      obj = cobj;
    }
    if (moved < stop && it >= 2) break;
  }
  return {pi, obj};
}

}  // namespace

OracleResult diverse_br_oracle(const Matrix& payoff, const MixedStrategy& opponent,
                               const Eigen::Ref<const Matrix>& pop_rows,
                               const OracleConfig& cfg) {
  cfg.validate();
  if (opponent.size() != payoff.cols())
    throw std::invalid_argument("diverse_br_oracle: opponent does not match payoff columns");
  if (pop_rows.rows() > 0 && pop_rows.cols() != payoff.cols())
    throw std::invalid_argument("diverse_br_oracle: population rows do not match payoff columns");
  if (cfg.tau == 0) return epsilon_br_oracle(payoff, opponent, 0.0);

  const Eigen::Index n = payoff.rows();
  Rng rng(cfg.seed);
  Ascent best{Vector(), -std::numeric_limits<double>::infinity()};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    Rng sub = rng.substream(r);
    Ascent a = ascend_simplex(payoff, opponent.probs, pop_rows, cfg.tau, cfg, sub.simplex_point(n));
    lo = std::min(lo, a.objective);
    hi = std::max(hi, a.objective);
    if (a.objective > best.objective) best = a;
  }
  // Polish from the best pure vertex so the returned value is never worse
  // than any pure candidate.
  const SelectionResult vertex = diverse_br_pure_search(payoff, opponent.probs, pop_rows, cfg.tau);
  Ascent polished = ascend_simplex(payoff, opponent.probs, pop_rows, cfg.tau, cfg,
                                   MixedStrategy::pure(n, vertex.index).probs);
  if (polished.objective > best.objective) best = polished;

  const double spread = hi - lo;
  if (cfg.alarm_on_restart_disagreement && spread > 10.0 * cfg.tolerance)
    throw ConvergenceError("diverse_br_oracle: restarts disagree beyond 10x tolerance", spread);
  OracleResult result{MixedStrategy::from(best.point), best.objective, true, spread};
  return result;
}

SelectionResult diverse_br_pure_search(const Matrix& payoff, const Vector& opponent,
                                       const Eigen::Ref<const Matrix>& pop_rows, double tau) {
  const Vector values = payoff * opponent;
  SelectionResult best{-1, -std::numeric_limits<double>::infinity()};
  for (Eigen::Index i = 0; i < payoff.rows(); ++i) {
    double obj = values[i];
    if (tau > 0) obj += tau * ec_rows_appended(pop_rows, payoff.row(i).transpose());
    if (obj > best.score) best = {static_cast<int>(i), obj};
  }
  return best;
}

SelectionResult rectified_oracle(const Matrix& candidate_payoffs, const Vector& nash) {
  if (candidate_payoffs.rows() == 0)
    throw std::invalid_argument("rectified_oracle: empty candidate set");
  if (nash.size() != candidate_payoffs.cols())
    throw std::invalid_argument("rectified_oracle: weight vector does not match columns");
  const Vector scores = candidate_payoffs.cwiseMax(0.0) * nash;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return {static_cast<int>(best), scores[best]};
}

Vector pbr_scores(const Matrix& payoff, const Vector& opp_profile, const Vector& own_profile,
                  const std::vector<int>& candidates) {
  if (opp_profile.size() != payoff.cols() || own_profile.size() != payoff.rows())
    throw std::invalid_argument("pbr_scores: profile dimensions do not match payoff");
  Vector scores = Vector::Zero(static_cast<Eigen::Index>(candidates.size()));
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const int cand = candidates[c];
    if (cand < 0 || cand >= payoff.rows()) throw std::out_of_range("pbr_scores: bad candidate");
    double total = 0.0;
    for (Eigen::Index j = 0; j < payoff.cols(); ++j) {
      if (opp_profile[j] <= 0) continue;
      double win = 0.0;
      for (Eigen::Index k = 0; k < payoff.rows(); ++k) {
        if (own_profile[k] <= 0) continue;
        if (payoff(cand, j) > payoff(k, j)) win += own_profile[k];
      }
      total += opp_profile[j] * win;
    }
    scores[static_cast<Eigen::Index>(c)] = total;
  }
  return scores;
}

SelectionResult pbr_oracle(const Matrix& payoff, const Vector& opp_profile,
                           const Vector& own_profile, const std::vector<int>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("pbr_oracle: empty candidate set");
  const Vector scores = pbr_scores(payoff, opp_profile, own_profile, candidates);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return {candidates[static_cast<std::size_t>(best)], scores[best]};
}

SelectionResult diverse_alpha_oracle(const Matrix& payoff, const Vector& opp_profile,
                                     const Vector& own_profile, const std::vector<int>& own_pop,
                                     const std::vector<int>& opp_pop,
                                     const std::vector<int>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("diverse_alpha_oracle: empty candidate set");
  const Vector pop_pbr = pbr_scores(payoff, opp_profile, own_profile, own_pop);
  const Vector cand_pbr = pbr_scores(payoff, opp_profile, own_profile, candidates);
  const Eigen::Index k = static_cast<Eigen::Index>(own_pop.size());
  Matrix rows(k + 1, static_cast<Eigen::Index>(opp_pop.size()));
  for (Eigen::Index i = 0; i < k; ++i)
    for (std::size_t j = 0; j < opp_pop.size(); ++j)
      rows(i, static_cast<Eigen::Index>(j)) = payoff(own_pop[static_cast<std::size_t>(i)], opp_pop[j]);
  Vector qualities(k + 1);
  qualities.head(k) = pop_pbr;

  SelectionResult best{-1, -std::numeric_limits<double>::infinity()};
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    for (std::size_t j = 0; j < opp_pop.size(); ++j)
      rows(k, static_cast<Eigen::Index>(j)) = payoff(candidates[c], opp_pop[j]);
    qualities[k] = cand_pbr[static_cast<Eigen::Index>(c)];
    double value = 0.0;
    if (rows.norm() > 0) value = expected_cardinality(qd_kernel(rows, qualities));
    if (value > best.score) best = {candidates[c], value};
  }
  return best;
}

double engine_oracle_objective(const GameEngine& engine, const std::vector<Vector>& opp_pop,
                               const Vector& opp_meta, const Matrix& own_rows, double tau,
                               const Vector& theta) {
  Vector row(static_cast<Eigen::Index>(opp_pop.size()));
  for (std::size_t j = 0; j < opp_pop.size(); ++j)
    row[static_cast<Eigen::Index>(j)] = engine.evaluate(theta, opp_pop[j]);
  double value = row.dot(opp_meta);
  if (tau > 0) value += tau * ec_rows_appended(own_rows, row);
  return value;
}

namespace {

Vector engine_grad(const GameEngine& engine, const Vector& theta, const Vector& opponent,
                   bool finite_diff) {
  if (!finite_diff) return engine.grad1(theta, opponent);
  const double h = 1e-5;
  Vector g(theta.size());
  Vector t = theta;
  for (Eigen::Index d = 0; d < theta.size(); ++d) {
    t[d] = theta[d] + h;
    const double up = engine.evaluate(t, opponent);
    t[d] = theta[d] - h;
    const double dn = engine.evaluate(t, opponent);
    t[d] = theta[d];
    g[d] = (up - dn) / (2 * h);
  }
  return g;
}

struct ThetaAscent {
  Vector theta;
  double objective;
};

ThetaAscent ascend_theta(const GameEngine& engine, const std::vector<Vector>& opp_pop,
                         const Vector& opp_meta, const Matrix& own_rows,
                         const OracleConfig& cfg, bool finite_diff, Vector theta) {
  double obj = engine_oracle_objective(engine, opp_pop, opp_meta, own_rows, cfg.tau, theta);
  const double stop = cfg.tolerance * 1e-2;
  const Eigen::Index m = static_cast<Eigen::Index>(opp_pop.size());
  for (int it = 0; it < cfg.max_iters; ++it) {
    Vector row(m);
    for (Eigen::Index j = 0; j < m; ++j)
      row[j] = engine.evaluate(theta, opp_pop[static_cast<std::size_t>(j)]);
    Vector weights = opp_meta;
    if (cfg.tau > 0) weights += cfg.tau * diversity_gradient(own_rows, row);
    Vector grad = Vector::Zero(theta.size());
    for (Eigen::Index j = 0; j < m; ++j) {
      if (weights[j] == 0) continue;
      grad += weights[j] * engine_grad(engine, theta, opp_pop[static_cast<std::size_t>(j)], finite_diff);
    }
    const double norm = grad.norm();
    if (norm < 1e-14) break;
    const Vector dir = grad / norm;
    double s = cfg.step_size;
    Vector cand = theta + s * dir;
    double cobj = engine_oracle_objective(engine, opp_pop, opp_meta, own_rows, cfg.tau, cand);
    int halvings = 0;
    while (cobj < obj && halvings < 30) {
      s *= 0.5;
      cand = theta + s * dir;
      cobj = engine_oracle_objective(engine, opp_pop, opp_meta, own_rows, cfg.tau, cand);
      ++halvings;
    }
    const double moved = cobj - obj;
    if (cobj >= obj) {
      theta = cand;
      obj = cobj;
    }
    if (moved < stop && it >= 5) break;
  }
  return {theta, obj};
}

Vector restart_start(const std::vector<Vector>& own_pop, int dim, const OracleConfig& cfg,
                     Rng& rng) {
  if (own_pop.empty()) return rng.normal_vector(dim, cfg.init_noise);
  const Vector& anchor = own_pop[static_cast<std::size_t>(rng.uniform_int(
      static_cast<int>(own_pop.size())))];
  return anchor + rng.normal_vector(dim, cfg.init_noise);
}

}  // namespace

ThetaOracleResult diverse_gradient_oracle(const GameEngine& engine,
                                          const std::vector<Vector>& opp_pop,
                                          const Vector& opp_meta,
                                          const std::vector<Vector>& own_pop,
                                          const Matrix& own_rows, const OracleConfig& cfg) {
  cfg.validate();
  if (opp_meta.size() != static_cast<Eigen::Index>(opp_pop.size()))
    throw std::invalid_argument("diverse_gradient_oracle: meta does not match population");
  const bool finite_diff = !engine.differentiable || !engine.grad1;
  if (finite_diff && !cfg.allow_finite_difference)
    throw ConfigError("diverse_gradient_oracle: engine has no gradient and finite differences are disabled");
  Rng rng(cfg.seed);
  ThetaAscent best{Vector(), -std::numeric_limits<double>::infinity()};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.restarts; ++r) {
    Rng sub = rng.substream(r);
    ThetaAscent a = ascend_theta(engine, opp_pop, opp_meta, own_rows, cfg, finite_diff,
                                 restart_start(own_pop, engine.param_dim, cfg, sub));
    lo = std::min(lo, a.objective);
    hi = std::max(hi, a.objective);
    if (a.objective > best.objective) best = a;
  }
  return {best.theta, best.objective, true, hi - lo};
}

ThetaOracleResult zero_order_oracle(const GameEngine& engine, const std::vector<Vector>& opp_pop,
                                    const Vector& opp_meta, const std::vector<Vector>& own_pop,
                                    const Matrix& own_rows, const OracleConfig& cfg) {
  cfg.validate();
  if (opp_meta.size() != static_cast<Eigen::Index>(opp_pop.size()))
    throw std::invalid_argument("zero_order_oracle: meta does not match population");
  Rng rng(cfg.seed);
  ThetaOracleResult best;
  best.objective_value = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  const double sigma = cfg.perturbation_std;
  for (int r = 0; r < cfg.restarts; ++r) {
    Rng sub = rng.substream(r);
    Vector theta = restart_start(own_pop, engine.param_dim, cfg, sub);
    double obj = engine_oracle_objective(engine, opp_pop, opp_meta, own_rows, cfg.tau, theta);
    Vector best_theta = theta;
    double best_obj = obj;
    for (int it = 0; it < cfg.max_iters; ++it) {
      Vector estimate = Vector::Zero(engine.param_dim);
      for (int p = 0; p < cfg.perturbation_count; ++p) {
        const Vector eps = sub.normal_vector(engine.param_dim, sigma);
        const double up =
            engine_oracle_objective(engine, opp_pop, opp_meta, own_rows, cfg.tau, theta + eps);
        const double dn =
            engine_oracle_objective(engine, opp_pop, opp_meta, own_rows, cfg.tau, theta - eps);
        estimate += (up - dn) * eps;
      }
      estimate /= 2.0 * sigma * sigma * cfg.perturbation_count;
      const double norm = estimate.norm();
      if (norm < 1e-14) break;
      theta += cfg.step_size * (estimate / norm);
      obj = engine_oracle_objective(engine, opp_pop, opp_meta, own_rows, cfg.tau, theta);
      if (obj > best_obj) {
        best_obj = obj;
        best_theta = theta;
      }
    }
    lo = std::min(lo, best_obj);
    hi = std::max(hi, best_obj);
    if (best_obj > best.objective_value) {
      best.objective_value = best_obj;
      best.theta = best_theta;
    }
  }
  best.restart_spread = hi - lo;
  return best;
}

}  // namespace metasolve
