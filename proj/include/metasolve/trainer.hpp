#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "metasolve/games.hpp"
#include "metasolve/oracles.hpp"
#include "metasolve/types.hpp"

namespace metasolve {

enum class MetaSolverKind { nash, uniform, self_play, alpha_rank };
enum class OracleKind { br, diverse_br, rectified, pbr, diverse_alpha, gradient, zero_order };
enum class TauSchedule { constant, harmonic, geometric };

// Population over a normal-form game: pure-strategy indices per player plus
// the induced meta-payoff table (player 1 view).
struct Population {
  std::vector<int> p1;
  std::vector<int> p2;
  Matrix meta;
  int generation = 0;
};

// Population over an open-ended engine: parameter vectors per player.
struct EnginePopulation {
  std::vector<Vector> p1;
  std::vector<Vector> p2;
  Matrix meta;
  int generation = 0;
};

struct IterationTrace {
  int iteration = 0;
  double exploitability = 0.0;
  double diversity = 0.0;
  double ed = 0.0;
  int pop_size_p1 = 0;
  int pop_size_p2 = 0;
  bool enlarged = false;
  long wall_ms = 0;
};

struct TrainerConfig {
  MetaSolverKind meta_solver = MetaSolverKind::nash;
  OracleKind oracle = OracleKind::br;
  std::optional<OracleKind> oracle_p2;  // head-to-head override
  int iterations = 20;
  TauSchedule tau_schedule = TauSchedule::constant;
  double tau = 1.0;
  std::optional<double> tau_p2;
  double tau_decay = 0.5;  // geometric schedule ratio
  std::uint64_t seed = 0;
  double nash_epsilon = 1e-6;
  OracleConfig oracle_cfg;
  bool early_termination = true;
  bool measure_time = true;
  // alpha-rank meta-solver parameters
  double alpha = 50.0;
  int population_m = 50;
  // restarts of the tau = 0 oracle used for the engine exploitability bound
  int exploit_restarts = 16;

  void validate() const {
    if (iterations < 1) throw ConfigError("TrainerConfig: iterations must be >= 1");
    if (nash_epsilon <= 0) throw ConfigError("TrainerConfig: nash_epsilon must be positive");
  }

  OracleKind oracle_for(int player) const {
    return (player == 2 && oracle_p2) ? *oracle_p2 : oracle;
  }
  double tau_for(int player) const { return (player == 2 && tau_p2) ? *tau_p2 : tau; }
};

struct FpResult {
  JointProfile profile;
  std::vector<IterationTrace> trace;
};

struct PsroResult {
  Population population;
  MixedStrategy meta1;  // final meta strategy over population p1
  MixedStrategy meta2;
  JointProfile full_profile;  // lifted to the full pure-strategy sets
  std::vector<IterationTrace> trace;
  bool terminated_early = false;
};

struct EnginePsroResult {
  EnginePopulation population;
  MixedStrategy meta1;
  MixedStrategy meta2;
  std::vector<IterationTrace> trace;
  bool terminated_early = false;
};

// Tau value at 1-based iteration t under the configured schedule.
double tau_at(const TrainerConfig& cfg, int t, int player = 1);

// Fictitious play with alternating diverse best responses and averaging
// step 1/t. The perturbation term of the averaged update is identically
// zero here.
FpResult run_diverse_fp(const PayoffMatrix& g, const TrainerConfig& cfg);

// PSRO loop over a normal-form game. `initial` must contain at least one
// strategy per player with a matching meta table (see initial_population).
PsroResult run_psro(const PayoffMatrix& g, const TrainerConfig& cfg, Population initial);

// PSRO loop over a differentiable or black-box engine.
EnginePsroResult run_psro(const GameEngine& engine, const TrainerConfig& cfg,
                          EnginePopulation initial);

// Fills only the entries of the meta table introduced by strategies appended
// since the table was built; previously computed entries are preserved
// bit-for-bit.
void expand_payoff_table(Population& pop, const PayoffMatrix& g);
void expand_payoff_table(EnginePopulation& pop, const GameEngine& engine);

// True iff neither player's oracle improves on its meta-strategy value by
// more than epsilon.
bool termination_check(double improvement1, double improvement2, double epsilon);

// Seeded default initial populations: one shared pure strategy (NFG) or one
// shared standard-Gaussian parameter vector (engine).
Population initial_population(const PayoffMatrix& g, std::uint64_t seed);
EnginePopulation initial_population(const GameEngine& engine, std::uint64_t seed);

// Meta strategy over a population lifted to the full pure-strategy simplex
// (duplicate members accumulate their mass).
MixedStrategy lift_to_full(const std::vector<int>& members, const MixedStrategy& meta, int n);

// Exploitability of a single player's population: the full-game gap of the
// Nash strategy of the population's self-restricted game. Used for
// head-to-head comparisons.
double population_exploitability(const PayoffMatrix& g, const std::vector<int>& members,
                                 int player, double nash_epsilon = 1e-6);

}  // namespace metasolve
