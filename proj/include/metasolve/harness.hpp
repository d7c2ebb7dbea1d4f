#pragma once

#include <set>
#include <string>
#include <vector>

#include "metasolve/geometry.hpp"
#include "metasolve/trainer.hpp"

namespace metasolve {

// Fraction of SSCC members of the full game discovered by `found`.
double pcs_score(const std::set<int>& found, const PayoffMatrix& m);

struct ExperimentConfig {
  std::string game = "rps";          // rps | rpsx | blotto | mixture | random:<n> | csv:<path>
  std::string solver = "psro-nash";  // fp | psro-nash | psro-uniform | psro-selfplay | psro-alpharank
  std::string oracle = "br";
  std::string oracle_p2;             // optional per-player override
  TrainerConfig trainer;
  bool tau_schedule_explicit = false;
  BlottoSpec blotto;
  double mixture_variance = 2.5;
  double mixture_radius = 5.0;
  bool mixture_normalize = false;
  bool csv_antisymmetrize = false;
  std::string output_path = "trace.csv";
  std::string svg_path;  // empty: no plot
  bool emit_svg = false;

  static ExperimentConfig from_json_file(const std::string& path);
  void apply_json(const std::string& text);  // merge a JSON document
};

// Builds the configured game and trainer, runs it, writes the trace CSV
// (and optionally an SVG plot). Returns 0 on success, 2 on configuration
// errors, 3 on convergence errors (achieved values are still written).
int run_experiment(const ExperimentConfig& cfg);

void write_trace_csv(const std::string& path, const std::vector<IterationTrace>& trace);
void write_trace_svg(const std::string& path, const std::vector<IterationTrace>& trace);

// Shared parsing helpers (exposed for the CLI).
OracleKind parse_oracle(const std::string& name);
MetaSolverKind parse_meta_solver(const std::string& solver_token);
bool solver_is_fp(const std::string& solver_token);
PayoffMatrix build_nfg(const ExperimentConfig& cfg);
bool game_is_engine(const std::string& game_token);
GameEngine build_engine(const ExperimentConfig& cfg);

}  // namespace metasolve
