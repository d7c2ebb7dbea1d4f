#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "metasolve/diversity.hpp"
#include "metasolve/game_core.hpp"
#include "metasolve/harness.hpp"

namespace {

using namespace metasolve;

int cmd_run(const std::string& config_path, const std::string& game, const std::string& solver,
            const std::string& oracle, const std::string& oracle_p2, double tau, int iterations,
            long long seed, const std::string& out, bool svg, const std::string& timing) {
  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = ExperimentConfig::from_json_file(config_path);
    if (!game.empty()) cfg.game = game;
    if (!solver.empty()) cfg.solver = solver;
    if (!oracle.empty()) cfg.oracle = oracle;
    if (!oracle_p2.empty()) cfg.oracle_p2 = oracle_p2;
    if (tau >= 0) cfg.trainer.tau = tau;
    if (iterations > 0) cfg.trainer.iterations = iterations;
    if (seed >= 0) cfg.trainer.seed = static_cast<std::uint64_t>(seed);
    if (!out.empty()) cfg.output_path = out;
    if (svg) cfg.emit_svg = true;
    if (timing == "none") cfg.trainer.measure_time = false;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  }
  return run_experiment(cfg);
}

int cmd_gen_game(const std::string& game, long long seed, const std::string& out) {
  try {
    ExperimentConfig cfg;
    cfg.game = game;
    cfg.trainer.seed = static_cast<std::uint64_t>(seed < 0 ? 0 : seed);
    const PayoffMatrix g = build_nfg(cfg);
    write_matrix_csv(out, g.p1());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  }
  return 0;
}

int cmd_eval(const std::string& payoff_path, const std::string& profile_path,
             const std::string& metric) {
  try {
    const PayoffMatrix g = load_meta_game(payoff_path);
    if (metric == "diversity") {
      std::printf("%.12g\n", diversity_of_rows(g.p1()));
      return 0;
    }
    if (profile_path.empty()) throw ConfigError("--profile is required for " + metric);
    const PayoffMatrix prof = load_meta_game(profile_path);
    if (prof.rows() != 2)
      throw ConfigError("profile csv must hold two rows: player 1 then player 2");
    const JointProfile p{MixedStrategy::from(prof.p1().row(0).transpose()),
                         MixedStrategy::from(prof.p1().row(1).transpose())};
    if (metric == "exploitability") {
      std::printf("%.12g\n", exploitability(g, p));
    } else if (metric == "ed") {
      std::printf("%.12g\n", effective_diversity(g.p1(), p));
    } else {
      throw ConfigError("unknown metric: " + metric);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diversity-aware game solvers and experiment runner"};
  app.require_subcommand(1);

  std::string config_path, game, solver, oracle, oracle_p2, out, timing, profile, metric, payoff;
  double tau = -1;
  int iterations = -1;
  long long seed = -1;
  bool svg = false;

  auto* run = app.add_subcommand("run", "run a configured experiment and write its trace");
  run->add_option("--config", config_path, "JSON experiment config");
  run->add_option("--game", game, "rps | rpsx | blotto | mixture | random:<n> | csv:<path>");
  run->add_option("--solver", solver, "fp | psro-nash | psro-uniform | psro-selfplay | psro-alpharank");
  run->add_option("--oracle", oracle, "br | diverse_br | rectified | pbr | diverse_alpha | gradient | zero_order");
  run->add_option("--oracle-p2", oracle_p2, "player-2 oracle override (head-to-head)");
  run->add_option("--tau", tau, "diversity weight");
  run->add_option("--iterations", iterations, "iteration budget");
  run->add_option("--seed", seed, "RNG seed");
  run->add_option("--out", out, "trace csv path");
  run->add_flag("--svg", svg, "also write an SVG plot next to the trace");
  run->add_option("--timing", timing, "real (default) or none for reproducible wall_ms");

  auto* gen = app.add_subcommand("gen-game", "write a payoff matrix csv");
  std::string gen_game_token, gen_out;
  long long gen_seed = 0;
  gen->add_option("--game", gen_game_token, "e.g. random:16")->required();
  gen->add_option("--seed", gen_seed, "RNG seed");
  gen->add_option("--out", gen_out, "output csv")->required();

  auto* ev = app.add_subcommand("eval", "evaluate a metric on a payoff csv");
  ev->add_option("--payoff", payoff, "payoff matrix csv")->required();
  ev->add_option("--profile", profile, "two-row csv: pi1 then pi2");
  ev->add_option("--metric", metric, "exploitability | diversity | ed")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed())
    return cmd_run(config_path, game, solver, oracle, oracle_p2, tau, iterations, seed, out, svg,
                   timing);
  if (gen->parsed()) return cmd_gen_game(gen_game_token, gen_seed, gen_out);
  if (ev->parsed()) return cmd_eval(payoff, profile, metric);
  return 2;
}
