#include <doctest.h>

#include <set>

#include "metasolve/diversity.hpp"
#include "metasolve/game_core.hpp"
#include "metasolve/games.hpp"
#include "metasolve/trainer.hpp"

using namespace metasolve;

namespace {

Population pure_initial(const PayoffMatrix& g, int s) {
  Population pop;
  pop.p1 = {s};
  pop.p2 = {s};
  pop.meta = Matrix::Constant(1, 1, g.p1()(s, s));
  return pop;
}

}  // namespace

TEST_CASE("fictitious play with tau zero matches the classical update") {
  const PayoffMatrix g = make_random_zero_sum(4, 2023);
  TrainerConfig cfg;
  cfg.iterations = 200;
  cfg.tau = 0.0;
  cfg.seed = 1;
  const FpResult diverse = run_diverse_fp(g, cfg);

  // Classical alternating fictitious play with lowest-index tie-breaks.
  const Matrix view1 = g.p1();
  const Matrix view2 = -g.p1().transpose();
  Vector p1 = Vector::Constant(4, 0.25);
  Vector p2 = Vector::Constant(4, 0.25);
  for (int t = 1; t <= cfg.iterations; ++t) {
    const double a = 1.0 / t;
    Eigen::Index b1;
    (view1 * p2).maxCoeff(&b1);
    Vector e1 = Vector::Zero(4);
    e1[b1] = 1.0;
    p1 = (1 - a) * p1 + a * e1;
    Eigen::Index b2;
    (view2 * p1).maxCoeff(&b2);
    Vector e2 = Vector::Zero(4);
    e2[b2] = 1.0;
    p2 = (1 - a) * p2 + a * e2;
  }
  CHECK((diverse.profile.p1.probs - p1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((diverse.profile.p2.probs - p2).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fictitious play traces stay on the simplex and diversity grows") {
  TrainerConfig cfg;
  cfg.iterations = 120;
  cfg.tau = 1.0;
  cfg.tau_schedule = TauSchedule::harmonic;
  cfg.seed = 5;
  cfg.measure_time = false;
  const FpResult r = run_diverse_fp(make_rps(), cfg);
  REQUIRE(r.trace.size() == 120);
  r.profile.p1.validate();
  r.profile.p2.validate();
  double prev = 0.0;
  for (const auto& t : r.trace) {
    CHECK(t.exploitability >= -1e-9);
    CHECK(t.diversity >= prev - 1e-9);
    prev = t.diversity;
    CHECK(t.wall_ms == 0);
  }
}

TEST_CASE("psro reaches the RPS-X equilibrium with the plain oracle") {
  const PayoffMatrix g = make_rpsx();
  TrainerConfig cfg;
  cfg.iterations = 10;
  cfg.meta_solver = MetaSolverKind::nash;
  cfg.oracle = OracleKind::br;
  const PsroResult r = run_psro(g, cfg, pure_initial(g, 0));
  CHECK(r.terminated_early);
  CHECK(r.trace.size() == 4);
  const std::set<int> found(r.population.p1.begin(), r.population.p1.end());
  CHECK(found.count(3) == 1);
  CHECK(exploitability(g, r.full_profile) <= cfg.nash_epsilon);
}

TEST_CASE("rectified psro stays inside the cycle on RPS-X") {
  const PayoffMatrix g = make_rpsx();
  TrainerConfig cfg;
  cfg.iterations = 12;
  cfg.oracle = OracleKind::rectified;
  const PsroResult r = run_psro(g, cfg, pure_initial(g, 0));
  CHECK(r.terminated_early);
  for (int s : r.population.p1) CHECK(s != 3);
  for (int s : r.population.p2) CHECK(s != 3);
  CHECK(r.trace.back().exploitability == doctest::Approx(4.0 / 5.0).epsilon(1e-6));
}

TEST_CASE("diverse psro finds the exploiting strategy on RPS-X") {
  const PayoffMatrix g = make_rpsx();
  TrainerConfig cfg;
  cfg.iterations = 10;
  cfg.oracle = OracleKind::diverse_br;
  cfg.tau = 1.0;
  const PsroResult r = run_psro(g, cfg, pure_initial(g, 0));
  const std::set<int> found(r.population.p1.begin(), r.population.p1.end());
  CHECK(found.count(3) == 1);
  CHECK(exploitability(g, r.full_profile) <= 1e-3);
}

TEST_CASE("expand_payoff_table preserves the existing block") {
  const PayoffMatrix g = make_random_zero_sum(6, 31);
  Population pop = pure_initial(g, 2);
  pop.p1.push_back(4);
  pop.p2.push_back(1);
  expand_payoff_table(pop, g);
  const Matrix before = pop.meta;
  pop.p1.push_back(5);
  pop.p2.push_back(3);
  expand_payoff_table(pop, g);
  CHECK(pop.meta.topLeftCorner(2, 2) == before);
  CHECK(pop.meta(2, 2) == g.p1()(5, 3));
  CHECK(pop.meta(0, 2) == g.p1()(2, 3));

  // No growth leaves the table untouched.
  const Matrix snapshot = pop.meta;
  expand_payoff_table(pop, g);
  CHECK(pop.meta == snapshot);
}

TEST_CASE("engine tables stay antisymmetric for shared populations") {
  const GameEngine engine = mixture_engine(MixtureModelSpec::seven_gaussians());
  EnginePopulation pop = initial_population(engine, 3);
  Vector extra(2);
  extra << 1.0, -2.0;
  pop.p1.push_back(extra);
  pop.p2.push_back(extra);
  expand_payoff_table(pop, engine);
  CHECK((pop.meta + pop.meta.transpose()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("termination rule") {
  CHECK(termination_check(0.0, 0.0, 1e-6));
  CHECK_FALSE(termination_check(2.0 / 5.0, 0.0, 1e-6));
  CHECK(termination_check(123.0, 456.0, std::numeric_limits<double>::infinity()));
}

TEST_CASE("psro traces grow diversity and preserve tables") {
  const PayoffMatrix g = make_random_zero_sum(9, 77);
  TrainerConfig cfg;
  cfg.iterations = 6;
  cfg.oracle = OracleKind::diverse_br;
  cfg.tau = 1.0;
  cfg.early_termination = false;
  cfg.measure_time = false;
  const PsroResult r = run_psro(g, cfg, initial_population(g, 12));
  REQUIRE(r.trace.size() == 6);
  double prev = 0.0;
  for (const auto& t : r.trace) {
    CHECK(t.diversity >= prev - 1e-9);
    prev = t.diversity;
    CHECK(t.exploitability >= -1e-9);
  }
  CHECK(r.population.p1.size() == 7);
  CHECK(r.population.meta.rows() == 7);
}

TEST_CASE("psro replay is deterministic") {
  const PayoffMatrix g = make_random_zero_sum(8, 5150);
  TrainerConfig cfg;
  cfg.iterations = 5;
  cfg.oracle = OracleKind::diverse_br;
  cfg.seed = 909;
  cfg.measure_time = false;
  const PsroResult a = run_psro(g, cfg, initial_population(g, cfg.seed));
  const PsroResult b = run_psro(g, cfg, initial_population(g, cfg.seed));
  CHECK(a.population.p1 == b.population.p1);
  CHECK(a.population.p2 == b.population.p2);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].exploitability == b.trace[i].exploitability);
    CHECK(a.trace[i].diversity == b.trace[i].diversity);
  }
}

TEST_CASE("incompatible configurations are rejected up front") {
  const PayoffMatrix g = make_rps();
  TrainerConfig cfg;
  cfg.oracle = OracleKind::gradient;
  CHECK_THROWS_AS(run_psro(g, cfg, pure_initial(g, 0)), ConfigError);

  TrainerConfig pbr_cfg;
  pbr_cfg.oracle = OracleKind::pbr;
  pbr_cfg.meta_solver = MetaSolverKind::nash;
  CHECK_THROWS_AS(run_psro(g, pbr_cfg, pure_initial(g, 0)), ConfigError);

  const GameEngine engine = mixture_engine(MixtureModelSpec::seven_gaussians());
  TrainerConfig engine_cfg;
  engine_cfg.oracle = OracleKind::br;
  CHECK_THROWS_AS(run_psro(engine, engine_cfg, initial_population(engine, 0)), ConfigError);

  TrainerConfig bad;
  bad.iterations = 0;
  CHECK_THROWS_AS(run_psro(g, bad, pure_initial(g, 0)), ConfigError);
}

TEST_CASE("alpha psro runs with pbr and diverse oracles") {
  const PayoffMatrix g = make_rpsx();
  TrainerConfig cfg;
  cfg.meta_solver = MetaSolverKind::alpha_rank;
  cfg.oracle = OracleKind::pbr;
  cfg.iterations = 6;
  cfg.early_termination = false;
  cfg.measure_time = false;
  const PsroResult plain = run_psro(g, cfg, pure_initial(g, 0));
  CHECK(plain.population.p1 == plain.population.p2);

  cfg.oracle = OracleKind::diverse_alpha;
  const PsroResult diverse = run_psro(g, cfg, pure_initial(g, 0));
  const std::set<int> found(diverse.population.p1.begin(), diverse.population.p1.end());
  // Theorem-level expectation: the population reaches the unique sink {X}.
  CHECK(found.count(3) == 1);
}

TEST_CASE("engine psro improves and keeps prefix tables") {
  const GameEngine engine = mixture_engine(MixtureModelSpec::seven_gaussians());
  TrainerConfig cfg;
  cfg.oracle = OracleKind::gradient;
  cfg.iterations = 5;
  cfg.tau = 1.0;
  cfg.seed = 4;
  cfg.measure_time = false;
  cfg.exploit_restarts = 4;
  cfg.oracle_cfg.restarts = 2;
  cfg.oracle_cfg.max_iters = 80;
  cfg.oracle_cfg.step_size = 0.5;
  const EnginePsroResult r = run_psro(engine, cfg, initial_population(engine, cfg.seed));
  CHECK(r.population.p1.size() >= 2);
  CHECK(r.population.meta.rows() == static_cast<Eigen::Index>(r.population.p1.size()));
  double prev = 0.0;
  for (const auto& t : r.trace) {
    CHECK(t.diversity >= prev - 1e-9);
    prev = t.diversity;
  }
}

TEST_CASE("population exploitability is zero only for full-support populations") {
  const PayoffMatrix g = make_rpsx();
  const double partial = population_exploitability(g, {0, 1, 2}, 1);
  CHECK(partial == doctest::Approx(2.0 / 5.0));
  const double full = population_exploitability(g, {0, 1, 2, 3}, 1);
  CHECK(full <= 1e-9);
}
