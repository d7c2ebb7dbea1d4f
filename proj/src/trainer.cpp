#include "metasolve/trainer.hpp"

#include <chrono>
#include <cmath>

#include "metasolve/diversity.hpp"
#include "metasolve/game_core.hpp"
#include "metasolve/geometry.hpp"
#include "metasolve/lp.hpp"
#include "metasolve/meta_solvers.hpp"
#include "metasolve/rng.hpp"

namespace metasolve {

namespace {

using Clock = std::chrono::steady_clock;

long elapsed_ms(Clock::time_point start, bool enabled) {
  if (!enabled) return 0;
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
}

// Player's own view of a zero-sum game: rows are the player's pure
// strategies, columns the opponent's.
Matrix player_view(const PayoffMatrix& g, int player) {
  return player == 1 ? g.p1() : Matrix(g.p2().transpose());
}

Matrix rows_of(const Matrix& view, const std::vector<int>& members) {
  Matrix out(static_cast<Eigen::Index>(members.size()), view.cols());
  for (std::size_t i = 0; i < members.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = view.row(members[i]);
  return out;
}


bool diversity_aware(OracleKind kind, double tau) {
  switch (kind) {
    case OracleKind::diverse_br:
    case OracleKind::gradient:
    case OracleKind::zero_order:
      return tau > 0;
    case OracleKind::diverse_alpha:
      return true;
    default:
      return false;
  }
}

struct MetaStrategies {
  MixedStrategy s1;
  MixedStrategy s2;
};

MetaStrategies solve_meta(const TrainerConfig& cfg, const Population* nfg_pop, const Matrix& meta) {
  switch (cfg.meta_solver) {
    case MetaSolverKind::nash: {
      const JointProfile p = solve_nash_zero_sum(PayoffMatrix::make_zero_sum(meta), cfg.nash_epsilon);
      return {p.p1, p.p2};
    }
    case MetaSolverKind::uniform:
      return {solve_uniform(static_cast<int>(meta.rows())),
              solve_uniform(static_cast<int>(meta.cols()))};
    case MetaSolverKind::self_play:
      return {solve_self_play(static_cast<int>(meta.rows())),
              solve_self_play(static_cast<int>(meta.cols()))};
    case MetaSolverKind::alpha_rank: {
      if (nfg_pop == nullptr)
        throw ConfigError("alpha_rank meta-solver requires a normal-form backend");
      if (nfg_pop->p1 != nfg_pop->p2)
        throw ConfigError("alpha_rank meta-solver requires identical populations");
      const AlphaRankResult ar =
          alpha_rank(PayoffMatrix::make_zero_sum(meta), cfg.alpha, cfg.population_m);
      MixedStrategy s{ar.stationary};
      return {s, s};
    }
  }
  throw ConfigError("unknown meta-solver");
}

}  // namespace

double tau_at(const TrainerConfig& cfg, int t, int player) {
  const double base = cfg.tau_for(player);
  switch (cfg.tau_schedule) {
    case TauSchedule::constant:
      return base;
    case TauSchedule::harmonic:
      return base / static_cast<double>(t);
    case TauSchedule::geometric:
      return base * std::pow(cfg.tau_decay, t);
  }
  return base;
}

bool termination_check(double improvement1, double improvement2, double epsilon) {
  return improvement1 <= epsilon && improvement2 <= epsilon;
}

MixedStrategy lift_to_full(const std::vector<int>& members, const MixedStrategy& meta, int n) {
  if (meta.size() != static_cast<Eigen::Index>(members.size()))
    throw std::invalid_argument("lift_to_full: meta strategy does not match population");
  Vector full = Vector::Zero(n);
  for (std::size_t i = 0; i < members.size(); ++i)
    full[members[i]] += meta.probs[static_cast<Eigen::Index>(i)];
  return MixedStrategy{full};
}

Population initial_population(const PayoffMatrix& g, std::uint64_t seed) {
  Rng rng(seed);
  Population pop;
  if (g.rows() == g.cols()) {
    const int s = rng.uniform_int(static_cast<int>(g.rows()));
    pop.p1 = {s};
    pop.p2 = {s};
  } else {
    pop.p1 = {rng.uniform_int(static_cast<int>(g.rows()))};
    pop.p2 = {rng.uniform_int(static_cast<int>(g.cols()))};
  }
  pop.meta = Matrix::Zero(1, 1);
  pop.meta(0, 0) = g.p1()(pop.p1[0], pop.p2[0]);
  return pop;
}

EnginePopulation initial_population(const GameEngine& engine, std::uint64_t seed) {
  Rng rng(seed);
  EnginePopulation pop;
  const Vector theta = rng.normal_vector(engine.param_dim);
  pop.p1 = {theta};
  pop.p2 = {theta};
  pop.meta = Matrix::Zero(1, 1);
  pop.meta(0, 0) = engine.evaluate(theta, theta);
  return pop;
}

void expand_payoff_table(Population& pop, const PayoffMatrix& g) {
  const Eigen::Index r = static_cast<Eigen::Index>(pop.p1.size());
  const Eigen::Index c = static_cast<Eigen::Index>(pop.p2.size());
  if (r < pop.meta.rows() || c < pop.meta.cols())
    throw std::invalid_argument("expand_payoff_table: population shrank");
  Matrix next(r, c);
  next.topLeftCorner(pop.meta.rows(), pop.meta.cols()) = pop.meta;
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      if (i >= pop.meta.rows() || j >= pop.meta.cols())
        next(i, j) = g.p1()(pop.p1[static_cast<std::size_t>(i)], pop.p2[static_cast<std::size_t>(j)]);
  pop.meta = std::move(next);
}

void expand_payoff_table(EnginePopulation& pop, const GameEngine& engine) {
  const Eigen::Index r = static_cast<Eigen::Index>(pop.p1.size());
  const Eigen::Index c = static_cast<Eigen::Index>(pop.p2.size());
  if (r < pop.meta.rows() || c < pop.meta.cols())
    throw std::invalid_argument("expand_payoff_table: population shrank");
  Matrix next(r, c);
  next.topLeftCorner(pop.meta.rows(), pop.meta.cols()) = pop.meta;
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j)
      if (i >= pop.meta.rows() || j >= pop.meta.cols())
        next(i, j) = engine.evaluate(pop.p1[static_cast<std::size_t>(i)],
                                     pop.p2[static_cast<std::size_t>(j)]);
  pop.meta = std::move(next);
}

FpResult run_diverse_fp(const PayoffMatrix& g, const TrainerConfig& cfg) {
  cfg.validate();
  const Matrix view1 = player_view(g, 1);
  const Matrix view2 = player_view(g, 2);
  const Eigen::Index n1 = view1.rows();
  const Eigen::Index n2 = view2.rows();
  Vector p1 = Vector::Constant(n1, 1.0 / static_cast<double>(n1));
  Vector p2 = Vector::Constant(n2, 1.0 / static_cast<double>(n2));
  // Accumulated Gram of the best-response payoff rows (dual form keeps the
  // per-iteration diversity update O(n^3) instead of O(t^3)).
  Matrix gram1 = Matrix::Zero(n2, n2);

  FpResult out;
  out.trace.reserve(cfg.iterations);
  for (int t = 1; t <= cfg.iterations; ++t) {
    const auto start = Clock::now();
    const double alpha = 1.0 / static_cast<double>(t);

    OracleConfig ocfg = cfg.oracle_cfg;
    ocfg.tau = tau_at(cfg, t, 1);
    ocfg.seed = Rng::substream_seed(cfg.seed, 2 * static_cast<std::uint64_t>(t));
    const OracleResult br1 = diverse_br_oracle(view1, MixedStrategy{p2}, view1, ocfg);
    p1 = (1.0 - alpha) * p1 + alpha * br1.strategy.probs;

    ocfg.tau = tau_at(cfg, t, 2);
    ocfg.seed = Rng::substream_seed(cfg.seed, 2 * static_cast<std::uint64_t>(t) + 1);
    const OracleResult br2 = diverse_br_oracle(view2, MixedStrategy{p1}, view2, ocfg);
    p2 = (1.0 - alpha) * p2 + alpha * br2.strategy.probs;

    const Vector w1 = view1.transpose() * br1.strategy.probs;
    gram1.noalias() += w1 * w1.transpose();

    IterationTrace tr;
    tr.iteration = t;
    const JointProfile prof{MixedStrategy{p1}, MixedStrategy{p2}};
    tr.exploitability = exploitability(g, prof);
    tr.diversity = expected_cardinality(((gram1 + gram1.transpose()) / 2.0).eval());
    tr.ed = effective_diversity(g.p1(), prof);
    tr.pop_size_p1 = t;
    tr.pop_size_p2 = t;
    tr.enlarged = false;
    tr.wall_ms = elapsed_ms(start, cfg.measure_time);
    out.trace.push_back(tr);
  }
  out.profile = {MixedStrategy{p1}, MixedStrategy{p2}};
  return out;
}

namespace {

struct NfgOracleOutcome {
  int candidate = -1;
  double improvement = 0.0;
};

NfgOracleOutcome run_nfg_oracle(const TrainerConfig& cfg, int player, int t, const Matrix& view,
                                const Population& pop, const MetaStrategies& meta,
                                const MixedStrategy& own_full, const MixedStrategy& opp_full,
                                double own_value) {
  const std::vector<int>& own_members = (player == 1) ? pop.p1 : pop.p2;
  const std::vector<int>& opp_members = (player == 1) ? pop.p2 : pop.p1;
  const MixedStrategy& own_meta = (player == 1) ? meta.s1 : meta.s2;
  const MixedStrategy& opp_meta = (player == 1) ? meta.s2 : meta.s1;
  (void)own_meta;
  const OracleKind kind = cfg.oracle_for(player);
  const Vector values = view * opp_full.probs;

  int candidate = -1;
  switch (kind) {
    case OracleKind::br: {
      Eigen::Index best = 0;
      for (Eigen::Index i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
      candidate = static_cast<int>(best);
      break;
    }
    case OracleKind::diverse_br: {
      const Matrix pop_rows = rows_of(view, own_members);
      candidate =
          diverse_br_pure_search(view, opp_full.probs, pop_rows, tau_at(cfg, t, player)).index;
      break;
    }
    case OracleKind::rectified: {
      // Attack every opponent Nash-support member in turn; keep the
      // highest-scoring attack (earliest member on ties).
      double best_score = -1.0;
      for (Eigen::Index j = 0; j < opp_meta.size(); ++j) {
        if (opp_meta.probs[j] <= kSimplexTol) continue;
        const Matrix column = view.col(opp_members[static_cast<std::size_t>(j)]);
        const SelectionResult attack = rectified_oracle(column, Vector::Ones(1));
        if (attack.score > best_score) {
          best_score = attack.score;
          candidate = attack.index;
        }
      }
      break;
    }
    case OracleKind::pbr: {
      std::vector<int> candidates(static_cast<std::size_t>(view.rows()));
      for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i] = static_cast<int>(i);
      candidate = pbr_oracle(view, opp_full.probs, own_full.probs, candidates).index;
      break;
    }
    case OracleKind::diverse_alpha: {
      std::vector<int> candidates(static_cast<std::size_t>(view.rows()));
      for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i] = static_cast<int>(i);
      candidate = diverse_alpha_oracle(view, opp_full.probs, own_full.probs, own_members,
                                       opp_members, candidates)
                      .index;
      break;
    }
    default:
      throw ConfigError("oracle is not compatible with a normal-form backend");
  }
  return {candidate, values[candidate] - own_value};
}

}  // namespace

PsroResult run_psro(const PayoffMatrix& g, const TrainerConfig& cfg, Population initial) {
  cfg.validate();
  const OracleKind k1 = cfg.oracle_for(1);
  const OracleKind k2 = cfg.oracle_for(2);
  for (OracleKind k : {k1, k2})
    if (k == OracleKind::gradient || k == OracleKind::zero_order)
      throw ConfigError("gradient and zero-order oracles require an engine backend");
  for (OracleKind k : {k1, k2})
    if ((k == OracleKind::pbr || k == OracleKind::diverse_alpha) &&
        cfg.meta_solver != MetaSolverKind::alpha_rank)
      throw ConfigError("pbr and diverse_alpha oracles require the alpha_rank meta-solver");
  if (initial.p1.empty() || initial.p2.empty())
    throw ConfigError("run_psro: initial population must not be empty");
  if (initial.meta.rows() != static_cast<Eigen::Index>(initial.p1.size()) ||
      initial.meta.cols() != static_cast<Eigen::Index>(initial.p2.size()))
    throw ConfigError("run_psro: initial meta table does not match populations");

  const Matrix view1 = player_view(g, 1);
  const Matrix view2 = player_view(g, 2);
  const int n1 = static_cast<int>(view1.rows());
  const int n2 = static_cast<int>(view2.rows());

  Population pop = std::move(initial);
  PsroResult out;
  out.trace.reserve(cfg.iterations);

  for (int t = 1; t <= cfg.iterations; ++t) {
    const auto start = Clock::now();
    const MetaStrategies meta = solve_meta(cfg, &pop, pop.meta);
    const MixedStrategy x1 = lift_to_full(pop.p1, meta.s1, n1);
    const MixedStrategy x2 = lift_to_full(pop.p2, meta.s2, n2);
    const JointProfile prof{x1, x2};
    const double exploit_now = exploitability(g, prof);
    const double ed_now = effective_diversity(pop.meta, {meta.s1, meta.s2});
    const double v1 = expected_payoff(g, prof, 1);
    const double v2 = expected_payoff(g, prof, 2);

    const NfgOracleOutcome o1 = run_nfg_oracle(cfg, 1, t, view1, pop, meta, x1, x2, v1);
    const NfgOracleOutcome o2 = run_nfg_oracle(cfg, 2, t, view2, pop, meta, x2, x1, v2);

    bool enlarged = false;
    if (diversity_aware(k1, tau_at(cfg, t, 1))) {
      Vector added(static_cast<Eigen::Index>(pop.p2.size()));
      for (std::size_t j = 0; j < pop.p2.size(); ++j)
        added[static_cast<Eigen::Index>(j)] = view1(o1.candidate, pop.p2[j]);
      enlarged = verify_enlargement(pop.meta, added);
    }

    pop.p1.push_back(o1.candidate);
    pop.p2.push_back(o2.candidate);
    expand_payoff_table(pop, g);
    ++pop.generation;

    IterationTrace tr;
    tr.iteration = t;
    tr.exploitability = exploit_now;
    tr.diversity = expected_cardinality(build_kernel(pop.meta));
    tr.ed = ed_now;
    tr.pop_size_p1 = static_cast<int>(pop.p1.size());
    tr.pop_size_p2 = static_cast<int>(pop.p2.size());
    tr.enlarged = enlarged;
    tr.wall_ms = elapsed_ms(start, cfg.measure_time);
    out.trace.push_back(tr);

    if (cfg.early_termination &&
        termination_check(o1.improvement, o2.improvement, cfg.nash_epsilon)) {
      out.terminated_early = true;
      break;
    }
  }

  const MetaStrategies final_meta = solve_meta(cfg, &pop, pop.meta);
  out.meta1 = final_meta.s1;
  out.meta2 = final_meta.s2;
  out.full_profile = {lift_to_full(pop.p1, final_meta.s1, n1),
                      lift_to_full(pop.p2, final_meta.s2, n2)};
  out.population = std::move(pop);
  return out;
}

namespace {

// Player 2's own view of a symmetric zero-sum engine equals the engine
// itself: phi(a, b) = -phi(b, a).
void check_symmetric_engine(const GameEngine& engine, const EnginePopulation& pop) {
  const Vector& a = pop.p1.front();
  const Vector& b = pop.p2.front();
  if (std::abs(engine.evaluate(a, b) + engine.evaluate(b, a)) > 1e-9)
    throw ConfigError("engine PSRO requires a symmetric zero-sum engine");
}

double engine_exploitability_bound(const GameEngine& engine, const EnginePopulation& pop,
                                   const MetaStrategies& meta, const TrainerConfig& cfg,
                                   std::uint64_t seed) {
  std::vector<Vector> anchors = pop.p1;
  anchors.insert(anchors.end(), pop.p2.begin(), pop.p2.end());
  OracleConfig ocfg = cfg.oracle_cfg;
  ocfg.tau = 0.0;
  ocfg.restarts = cfg.exploit_restarts;
  double total = 0.0;
  for (int player = 1; player <= 2; ++player) {
    const std::vector<Vector>& opp = (player == 1) ? pop.p2 : pop.p1;
    const Vector& opp_meta = (player == 1) ? meta.s2.probs : meta.s1.probs;
    ocfg.seed = Rng::substream_seed(seed, 77 + static_cast<std::uint64_t>(player));
    const ThetaOracleResult adv = (cfg.oracle_for(player) == OracleKind::zero_order)
                                      ? zero_order_oracle(engine, opp, opp_meta, anchors,
                                                          Matrix(0, static_cast<Eigen::Index>(opp.size())), ocfg)
                                      : diverse_gradient_oracle(engine, opp, opp_meta, anchors,
                                                                Matrix(0, static_cast<Eigen::Index>(opp.size())), ocfg);
    total += adv.objective_value;
  }
  return total;
}

}  // namespace

EnginePsroResult run_psro(const GameEngine& engine, const TrainerConfig& cfg,
                          EnginePopulation initial) {
  cfg.validate();
  for (int player = 1; player <= 2; ++player) {
    const OracleKind k = cfg.oracle_for(player);
    if (k != OracleKind::gradient && k != OracleKind::zero_order)
      throw ConfigError("engine PSRO supports only the gradient and zero-order oracles");
  }
  if (cfg.meta_solver == MetaSolverKind::alpha_rank)
    throw ConfigError("alpha_rank meta-solver requires a normal-form backend");
  if (initial.p1.empty() || initial.p2.empty())
    throw ConfigError("run_psro: initial population must not be empty");
  check_symmetric_engine(engine, initial);

  EnginePopulation pop = std::move(initial);
  EnginePsroResult out;
  out.trace.reserve(cfg.iterations);

  for (int t = 1; t <= cfg.iterations; ++t) {
    const auto start = Clock::now();
    const MetaStrategies meta = solve_meta(cfg, nullptr, pop.meta);
    const double v1 = meta.s1.probs.dot(pop.meta * meta.s2.probs);
    const double ed_now = effective_diversity(pop.meta, {meta.s1, meta.s2});
    const double exploit_now =
        engine_exploitability_bound(engine, pop, meta, cfg, cfg.seed + 7919 * t);

    ThetaOracleResult r1, r2;
    for (int player = 1; player <= 2; ++player) {
      OracleConfig ocfg = cfg.oracle_cfg;
      ocfg.tau = tau_at(cfg, t, player);
      ocfg.seed = Rng::substream_seed(cfg.seed, 2 * static_cast<std::uint64_t>(t) +
                                                    static_cast<std::uint64_t>(player - 1));
      const std::vector<Vector>& own = (player == 1) ? pop.p1 : pop.p2;
      const std::vector<Vector>& opp = (player == 1) ? pop.p2 : pop.p1;
      const Vector& opp_meta = (player == 1) ? meta.s2.probs : meta.s1.probs;
      const Matrix own_rows = (player == 1) ? pop.meta : Matrix(-pop.meta.transpose());
      ThetaOracleResult res = (cfg.oracle_for(player) == OracleKind::zero_order)
                                  ? zero_order_oracle(engine, opp, opp_meta, own, own_rows, ocfg)
                                  : diverse_gradient_oracle(engine, opp, opp_meta, own, own_rows, ocfg);
      if (player == 1) r1 = res;
      else r2 = res;
    }

    // Payoff-based improvements for the termination rule.
    auto payoff_against = [&](const Vector& theta, const std::vector<Vector>& opp,
                              const Vector& w) {
      double val = 0.0;
      for (std::size_t j = 0; j < opp.size(); ++j)
        val += w[static_cast<Eigen::Index>(j)] * engine.evaluate(theta, opp[j]);
      return val;
    };
    const double imp1 = payoff_against(r1.theta, pop.p2, meta.s2.probs) - v1;
    const double imp2 = payoff_against(r2.theta, pop.p1, meta.s1.probs) - (-v1);

    bool enlarged = false;
    if (diversity_aware(cfg.oracle_for(1), tau_at(cfg, t, 1))) {
      Vector added(static_cast<Eigen::Index>(pop.p2.size()));
      for (std::size_t j = 0; j < pop.p2.size(); ++j)
        added[static_cast<Eigen::Index>(j)] = engine.evaluate(r1.theta, pop.p2[j]);
      enlarged = verify_enlargement(pop.meta, added);
    }

    pop.p1.push_back(r1.theta);
    pop.p2.push_back(r2.theta);
    expand_payoff_table(pop, engine);
    ++pop.generation;

    IterationTrace tr;
    tr.iteration = t;
    tr.exploitability = exploit_now;
    tr.diversity = expected_cardinality(build_kernel(pop.meta));
    tr.ed = ed_now;
    tr.pop_size_p1 = static_cast<int>(pop.p1.size());
    tr.pop_size_p2 = static_cast<int>(pop.p2.size());
    tr.enlarged = enlarged;
    tr.wall_ms = elapsed_ms(start, cfg.measure_time);
    out.trace.push_back(tr);

    if (cfg.early_termination && termination_check(imp1, imp2, cfg.nash_epsilon)) {
      out.terminated_early = true;
      break;
    }
  }

  const MetaStrategies final_meta = solve_meta(cfg, nullptr, pop.meta);
  out.meta1 = final_meta.s1;
  out.meta2 = final_meta.s2;
  out.population = std::move(pop);
  return out;
}

double population_exploitability(const PayoffMatrix& g, const std::vector<int>& members,
                                 int player, double nash_epsilon) {
  if (members.empty()) throw std::invalid_argument("population_exploitability: empty population");
  if (!g.antisymmetric())
    throw std::invalid_argument("population_exploitability assumes a symmetric zero-sum game");
  (void)nash_epsilon;
  const Matrix view = player_view(g, player);
  Matrix sub(static_cast<Eigen::Index>(members.size()), static_cast<Eigen::Index>(members.size()));
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = 0; j < members.size(); ++j)
      sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = view(members[i], members[j]);
  const Vector x = lp::maximin_strategy(sub);
  const MixedStrategy lifted = lift_to_full(members, MixedStrategy{x}, static_cast<int>(view.rows()));
  // Adversarial gain of the opponent against the lifted strategy; the game
  // value is zero for symmetric zero-sum games.
  return best_response(g, lifted, player == 1 ? 2 : 1).value;
}

}  // namespace metasolve
