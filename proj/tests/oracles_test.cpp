#include <doctest.h>

#include "metasolve/diversity.hpp"
#include "metasolve/games.hpp"
#include "metasolve/oracles.hpp"
#include "metasolve/rng.hpp"

using namespace metasolve;

namespace {

Vector uniform_rps_in_rpsx() {
  Vector v(4);
  v << 1.0 / 3, 1.0 / 3, 1.0 / 3, 0.0;
  return v;
}

Matrix rows_of(const Matrix& view, const std::vector<int>& members) {
  Matrix out(static_cast<Eigen::Index>(members.size()), view.cols());
  for (std::size_t i = 0; i < members.size(); ++i) out.row(i) = view.row(members[i]);
  return out;
}

}  // namespace

TEST_CASE("exact best-response oracle") {
  const Matrix rps = make_rps().p1();
  const OracleResult vs_rock = epsilon_br_oracle(rps, MixedStrategy::pure(3, 0), 0.0);
  CHECK(vs_rock.strategy.probs[1] == 1.0);  // paper
  CHECK(vs_rock.objective_value == doctest::Approx(1.0));

  const Matrix rpsx = make_rpsx().p1();
  const OracleResult vs_mix = epsilon_br_oracle(rpsx, MixedStrategy{uniform_rps_in_rpsx()}, 0.0);
  CHECK(vs_mix.strategy.probs[3] == 1.0);
  CHECK(vs_mix.objective_value == doctest::Approx(2.0 / 5.0));

  CHECK_THROWS_AS(epsilon_br_oracle(rps, MixedStrategy::pure(3, 0), -1.0), std::invalid_argument);
}

TEST_CASE("simplex projection") {
  Vector v(3);
  v << 0.2, 0.3, 0.5;
  CHECK((project_to_simplex(v) - v).cwiseAbs().maxCoeff() < 1e-15);
  Vector w(3);
  w << 5.0, -1.0, 0.0;
  const Vector p = project_to_simplex(w);
  CHECK(p.sum() == doctest::Approx(1.0));
  CHECK(p[0] == doctest::Approx(1.0));
  CHECK(p.minCoeff() >= 0.0);
}

TEST_CASE("diverse best response reduces to the exact oracle at tau zero") {
  const Matrix rps = make_rps().p1();
  OracleConfig cfg;
  cfg.tau = 0.0;
  cfg.seed = 11;
  const OracleResult r = diverse_br_oracle(rps, MixedStrategy::pure(3, 0), rps, cfg);
  CHECK(r.strategy.probs[1] == 1.0);
  CHECK(r.objective_value == doctest::Approx(1.0));
  CHECK(r.restart_spread == 0.0);
}

TEST_CASE("diverse best response moves mass off the duplicated row") {
  // Population holds only Rock's payoff row; with a large diversity weight
  // the oracle prefers mass on Paper and Scissors, whose rows differ.
  const Matrix rps = make_rps().p1();
  Matrix pop_rows(1, 3);
  pop_rows = rps.row(0);
  OracleConfig cfg;
  cfg.tau = 100.0;
  cfg.seed = 3;
  const OracleResult r = diverse_br_oracle(rps, MixedStrategy::uniform(3), pop_rows, cfg);
  CHECK(r.strategy.probs[1] + r.strategy.probs[2] > r.strategy.probs[0]);

  // Cross-check against a grid sweep of the same objective.
  double grid_best = -1e300;
  for (int a = 0; a <= 100; ++a) {
    for (int b = 0; b <= 100 - a; ++b) {
      Vector pi(3);
      pi << a / 100.0, b / 100.0, (100 - a - b) / 100.0;
      grid_best = std::max(
          grid_best, diverse_br_objective(rps, Vector::Constant(3, 1.0 / 3), pop_rows, 100.0, pi));
    }
  }
  CHECK(r.objective_value >= grid_best - 1e-4);
}

TEST_CASE("diverse best response dominates the uniform point") {
  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const PayoffMatrix g = make_random_zero_sum(5, 600 + trial);
    const Vector opp = rng.simplex_point(5);
    const Matrix pop_rows = rows_of(g.p1(), {0, 2});
    OracleConfig cfg;
    cfg.tau = 1.0;
    cfg.seed = 1234 + trial;
    const OracleResult r = diverse_br_oracle(g.p1(), MixedStrategy{opp}, pop_rows, cfg);
    const double at_uniform =
        diverse_br_objective(g.p1(), opp, pop_rows, 1.0, Vector::Constant(5, 0.2));
    CHECK(r.objective_value >= at_uniform - cfg.tolerance);
    CHECK(r.strategy.probs.minCoeff() >= -1e-12);
    CHECK(r.strategy.probs.sum() == doctest::Approx(1.0));
  }
}

TEST_CASE("diverse best response is seed-reproducible") {
  const PayoffMatrix g = make_random_zero_sum(6, 9090);
  OracleConfig cfg;
  cfg.tau = 0.7;
  cfg.seed = 555;
  const Matrix pop_rows = rows_of(g.p1(), {1, 4});
  const OracleResult a = diverse_br_oracle(g.p1(), MixedStrategy::uniform(6), pop_rows, cfg);
  const OracleResult b = diverse_br_oracle(g.p1(), MixedStrategy::uniform(6), pop_rows, cfg);
  CHECK(a.objective_value == b.objective_value);
  CHECK((a.strategy.probs - b.strategy.probs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("tau continuity: the payoff gap shrinks with tau") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const PayoffMatrix g = make_random_zero_sum(5, 7100 + trial);
    const Vector opp = rng.simplex_point(5);
    const Matrix pop_rows = rows_of(g.p1(), {0});
    const double exact = epsilon_br_oracle(g.p1(), MixedStrategy{opp}, 0.0).objective_value;
    double prev_gap = 1e300;
    for (double tau : {1.0, 0.1, 0.01, 0.0}) {
      OracleConfig cfg;
      cfg.tau = tau;
      cfg.seed = 31 + trial;
      const OracleResult r = diverse_br_oracle(g.p1(), MixedStrategy{opp}, pop_rows, cfg);
      const double payoff_gap = r.objective_value - exact;
      CHECK(payoff_gap >= -1e-9);
      CHECK(payoff_gap <= prev_gap + 1e-7);
      prev_gap = payoff_gap;
    }
    CHECK(prev_gap <= 1e-9);
  }
}

TEST_CASE("rectified oracle") {
  const Matrix rpsx = make_rpsx().p1();
  // Aggregated attack of the uniform {R,P,S} Nash: X scores 2/5 > 1/3.
  Vector nash(3);
  nash << 1.0 / 3, 1.0 / 3, 1.0 / 3;
  const SelectionResult x = rectified_oracle(rpsx.leftCols(3), nash);
  CHECK(x.index == 3);
  CHECK(x.score == doctest::Approx(2.0 / 5.0));

  // All-negative payoffs rectify to zero everywhere; lowest index wins.
  const SelectionResult zero =
      rectified_oracle(Matrix::Constant(4, 2, -1.0), Vector::Constant(2, 0.5));
  CHECK(zero.index == 0);
  CHECK(zero.score == 0.0);

  const SelectionResult single = rectified_oracle(Matrix::Constant(1, 1, 3.0), Vector::Ones(1));
  CHECK(single.index == 0);
  CHECK_THROWS_AS(rectified_oracle(Matrix(0, 2), Vector::Ones(2)), std::invalid_argument);
}

TEST_CASE("preference-based best response") {
  const Matrix rpsx = make_rpsx().p1();
  const Vector profile = uniform_rps_in_rpsx();
  const std::vector<int> all{0, 1, 2, 3};
  const SelectionResult pick = pbr_oracle(rpsx, profile, profile, all);
  CHECK(pick.index == 3);
  CHECK(pick.score == doctest::Approx(2.0 / 3.0));
  // The three cycle strategies tie at 1/3 under the symmetric profile.
  const Vector scores = pbr_scores(rpsx, profile, profile, all);
  CHECK(scores[0] == doctest::Approx(1.0 / 3.0));
  CHECK(scores[1] == doctest::Approx(1.0 / 3.0));
  CHECK(scores[2] == doctest::Approx(1.0 / 3.0));

  const SelectionResult single = pbr_oracle(rpsx, profile, profile, {2});
  CHECK(single.index == 2);

  // A zero game gives zero scores and the lowest index.
  const Matrix zero = Matrix::Zero(3, 3);
  const Vector u3 = Vector::Constant(3, 1.0 / 3);
  const SelectionResult z = pbr_oracle(zero, u3, u3, {0, 1, 2});
  CHECK(z.index == 0);
  CHECK(z.score == 0.0);
}

TEST_CASE("quality-diversity oracle prefers the novel row") {
  const Matrix rpsx = make_rpsx().p1();
  // Population {R} against itself: the oracle scores candidates by the
  // expected cardinality of the quality-diversity kernel.
  Vector profile = Vector::Zero(4);
  profile[0] = 1.0;
  const std::vector<int> all{0, 1, 2, 3};
  const SelectionResult first =
      diverse_alpha_oracle(rpsx, profile, profile, {0}, {0}, all);
  CHECK(first.index != 0);  // a duplicate of R is never the most diverse pick

  // A candidate identical to an existing member scores no higher than a
  // distinct candidate of equal quality.
  Matrix two(2, 2);
  two << 0, 1, -1, 0;
  const Vector u2 = Vector::Constant(2, 0.5);
  const SelectionResult pick = diverse_alpha_oracle(two, u2, u2, {0}, {0, 1}, {0, 1});
  CHECK(pick.index == 1);

  CHECK_THROWS_AS(diverse_alpha_oracle(rpsx, profile, profile, {0}, {0}, {}),
                  std::invalid_argument);
}

TEST_CASE("qd oracle replays RPS-X exploration") {
  // alpha-PSRO style replay: starting from {R} with uniform opponent
  // profiles over the population, the diverse oracle reaches X.
  const Matrix rpsx = make_rpsx().p1();
  std::vector<int> pop{0};
  bool saw_x = false;
  for (int t = 0; t < 4; ++t) {
    Vector profile = Vector::Zero(4);
    for (int s : pop) profile[s] += 1.0 / static_cast<double>(pop.size());
    const SelectionResult pick =
        diverse_alpha_oracle(rpsx, profile, profile, pop, pop, {0, 1, 2, 3});
    pop.push_back(pick.index);
    if (pick.index == 3) saw_x = true;
  }
  CHECK(saw_x);
}

TEST_CASE("gradient oracle climbs the mixture objective") {
  const GameEngine engine = mixture_engine(MixtureModelSpec::seven_gaussians());
  Rng rng(5);
  std::vector<Vector> opp_pop{Vector(engine.param_dim)};
  opp_pop[0] = MixtureModelSpec::seven_gaussians().centers.row(0).transpose();
  const Vector opp_meta = Vector::Ones(1);
  std::vector<Vector> own_pop{rng.normal_vector(2, 1.0)};
  Matrix own_rows(1, 1);
  own_rows(0, 0) = engine.evaluate(own_pop[0], opp_pop[0]);

  OracleConfig cfg;
  cfg.tau = 0.0;
  cfg.seed = 42;
  cfg.step_size = 0.5;
  cfg.max_iters = 200;
  cfg.init_noise = 2.0;
  const ThetaOracleResult r = diverse_gradient_oracle(engine, opp_pop, opp_meta, own_pop, own_rows, cfg);
  // The oracle beats the opponent sitting on a hump.
  CHECK(r.objective_value > 0.0);
  CHECK(engine.evaluate(r.theta, opp_pop[0]) > 0.0);

  // Objective at the returned point is at least each restart's start value.
  for (int k = 0; k < cfg.restarts; ++k) {
    Rng sub = Rng(cfg.seed).substream(k);
    const int anchor = sub.uniform_int(static_cast<int>(own_pop.size()));
    const Vector start = own_pop[anchor] + sub.normal_vector(2, cfg.init_noise);
    CHECK(r.objective_value >=
          engine_oracle_objective(engine, opp_pop, opp_meta, own_rows, cfg.tau, start) - 1e-9);
  }
}

TEST_CASE("gradient oracle requires a differentiable engine") {
  GameEngine opaque;
  opaque.param_dim = 2;
  opaque.differentiable = false;
  opaque.evaluate = [](const Vector& a, const Vector& b) { return a[0] - b[0]; };
  const std::vector<Vector> pop{Vector::Zero(2)};
  OracleConfig cfg;
  CHECK_THROWS_AS(
      diverse_gradient_oracle(opaque, pop, Vector::Ones(1), pop, Matrix::Zero(1, 1), cfg),
      ConfigError);
  cfg.allow_finite_difference = true;
  cfg.max_iters = 5;
  CHECK_NOTHROW(
      diverse_gradient_oracle(opaque, pop, Vector::Ones(1), pop, Matrix::Zero(1, 1), cfg));
}

TEST_CASE("appending the gradient oracle result never decreases diversity") {
  const GameEngine engine = mixture_engine(MixtureModelSpec::seven_gaussians());
  Rng rng(8);
  std::vector<Vector> pop;
  for (int i = 0; i < 3; ++i) pop.push_back(rng.normal_vector(2, 3.0));
  Matrix rows(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) rows(i, j) = engine.evaluate(pop[i], pop[j]);
  OracleConfig cfg;
  cfg.tau = 1.0;
  cfg.seed = 99;
  cfg.step_size = 0.5;
  const ThetaOracleResult r =
      diverse_gradient_oracle(engine, pop, Vector::Constant(3, 1.0 / 3), pop, rows, cfg);
  Vector new_row(3);
  for (int j = 0; j < 3; ++j) new_row[j] = engine.evaluate(r.theta, pop[j]);
  Matrix grown(4, 3);
  grown << rows, new_row.transpose();
  CHECK(diversity_of_rows(grown) >= diversity_of_rows(rows) - 1e-9);
}

TEST_CASE("zero-order oracle tracks the gradient oracle") {
  const GameEngine engine = mixture_engine(MixtureModelSpec::seven_gaussians());
  std::vector<Vector> opp_pop{MixtureModelSpec::seven_gaussians().centers.row(2).transpose()};
  const Vector opp_meta = Vector::Ones(1);
  Rng rng(4);
  std::vector<Vector> own_pop{rng.normal_vector(2, 1.0)};
  Matrix own_rows(1, 1);
  own_rows(0, 0) = engine.evaluate(own_pop[0], opp_pop[0]);

  OracleConfig cfg;
  cfg.tau = 1.0;
  cfg.seed = 21;
  cfg.step_size = 0.5;
  cfg.max_iters = 120;
  cfg.init_noise = 2.0;
  const ThetaOracleResult grad = diverse_gradient_oracle(engine, opp_pop, opp_meta, own_pop, own_rows, cfg);

  OracleConfig zcfg = cfg;
  zcfg.perturbation_std = 0.05;
  zcfg.perturbation_count = 32;
  const ThetaOracleResult zo = zero_order_oracle(engine, opp_pop, opp_meta, own_pop, own_rows, zcfg);

  // Best-of safeguard: the returned objective is at least every restart's
  // starting value.
  for (int k = 0; k < zcfg.restarts; ++k) {
    Rng sub = Rng(zcfg.seed).substream(k);
    const int anchor = sub.uniform_int(static_cast<int>(own_pop.size()));
    const Vector start = own_pop[anchor] + sub.normal_vector(2, zcfg.init_noise);
    CHECK(zo.objective_value >=
          engine_oracle_objective(engine, opp_pop, opp_meta, own_rows, zcfg.tau, start) - 1e-12);
  }
  // Within 5% of the first-order answer on the same problem.
  CHECK(std::abs(zo.objective_value - grad.objective_value) <=
        0.05 * std::abs(grad.objective_value));

  OracleConfig bad = cfg;
  bad.perturbation_std = 0.0;
  CHECK_THROWS_AS(zero_order_oracle(engine, opp_pop, opp_meta, own_pop, own_rows, bad),
                  std::invalid_argument);
}
