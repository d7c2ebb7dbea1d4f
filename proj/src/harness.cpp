#include "metasolve/harness.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "metasolve/diversity.hpp"
#include "metasolve/game_core.hpp"
#include "metasolve/meta_solvers.hpp"

namespace metasolve {

using nlohmann::json;

double pcs_score(const std::set<int>& found, const PayoffMatrix& m) {
  const auto ssccs = find_sscc_bruteforce(m);
  std::set<int> members;
  for (const auto& comp : ssccs) members.insert(comp.begin(), comp.end());
  if (members.empty()) return 1.0;
  for (int f : found)
    if (f < 0 || f >= m.rows()) throw std::out_of_range("pcs_score: strategy index out of range");
  int hit = 0;
  for (int s : members)
    if (found.count(s)) ++hit;
  return static_cast<double>(hit) / static_cast<double>(members.size());
}

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void atomic_write(const std::string& path, const std::string& body) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << body;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_trace_csv(const std::string& path, const std::vector<IterationTrace>& trace) {
  std::ostringstream body;
  body << "iter,exploitability,diversity,ed,pop_size_p1,pop_size_p2,enlarged,wall_ms\n";
  for (const auto& t : trace) {
    body << t.iteration << ',' << format_number(t.exploitability) << ','
         << format_number(t.diversity) << ',' << format_number(t.ed) << ',' << t.pop_size_p1
         << ',' << t.pop_size_p2 << ',' << (t.enlarged ? 1 : 0) << ',' << t.wall_ms << '\n';
  }
  atomic_write(path, body.str());
}

void write_trace_svg(const std::string& path, const std::vector<IterationTrace>& trace) {
  const int width = 720;
  const int height = 420;
  const int margin = 50;
  double max_y = 1e-12;
  for (const auto& t : trace) {
    max_y = std::max(max_y, t.exploitability);
    max_y = std::max(max_y, t.diversity);
  }
  const double max_x = std::max<std::size_t>(trace.size(), 2) - 1;
  auto sx = [&](double i) { return margin + i / max_x * (width - 2 * margin); };
  auto sy = [&](double v) { return height - margin - v / max_y * (height - 2 * margin); };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "' viewBox='0 0 " << width << ' ' << height << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<line x1='" << margin << "' y1='" << height - margin << "' x2='" << width - margin
      << "' y2='" << height - margin << "' stroke='black'/>\n"
      << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin << "' y2='"
      << height - margin << "' stroke='black'/>\n";
  const struct {
    const char* color;
    double IterationTrace::* field;
    const char* label;
    int label_y;
  } series[] = {{"#1f77b4", &IterationTrace::exploitability, "exploitability", 20},
                {"#d62728", &IterationTrace::diversity, "diversity", 38}};
  for (const auto& s : series) {
    svg << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < trace.size(); ++i)
      svg << sx(static_cast<double>(i)) << ',' << sy(trace[i].*(s.field)) << ' ';
    svg << "'/>\n";
    svg << "<text x='" << width - margin - 150 << "' y='" << s.label_y << "' fill='" << s.color
        << "' font-family='sans-serif' font-size='13'>" << s.label << "</text>\n";
  }
  svg << "<text x='" << width / 2 << "' y='" << height - 12
      << "' font-family='sans-serif' font-size='13' text-anchor='middle'>iteration</text>\n";
  svg << "<text x='" << margin << "' y='" << margin - 8 << "' font-family='sans-serif'"
      << " font-size='12'>max " << format_number(max_y) << "</text>\n";
  svg << "</svg>\n";
  atomic_write(path, svg.str());
}

OracleKind parse_oracle(const std::string& name) {
  if (name == "br") return OracleKind::br;
  if (name == "diverse_br") return OracleKind::diverse_br;
  if (name == "rectified") return OracleKind::rectified;
  if (name == "pbr") return OracleKind::pbr;
  if (name == "diverse_alpha") return OracleKind::diverse_alpha;
  if (name == "gradient") return OracleKind::gradient;
  if (name == "zero_order") return OracleKind::zero_order;
  throw ConfigError("unknown oracle: " + name);
}

bool solver_is_fp(const std::string& token) { return token == "fp"; }

MetaSolverKind parse_meta_solver(const std::string& token) {
  if (token == "psro-nash") return MetaSolverKind::nash;
  if (token == "psro-uniform") return MetaSolverKind::uniform;
  if (token == "psro-selfplay") return MetaSolverKind::self_play;
  if (token == "psro-alpharank") return MetaSolverKind::alpha_rank;
  throw ConfigError("unknown solver: " + token + " (expected fp or psro-<meta>)");
}

bool game_is_engine(const std::string& game_token) { return game_token == "mixture"; }

PayoffMatrix build_nfg(const ExperimentConfig& cfg) {
  const std::string& game = cfg.game;
  if (game == "rps") return make_rps();
  if (game == "rpsx") return make_rpsx();
  if (game == "blotto") return make_blotto(cfg.blotto);
  if (game.rfind("random:", 0) == 0) {
    const int n = std::stoi(game.substr(7));
    return make_random_zero_sum(n, cfg.trainer.seed);
  }
  if (game.rfind("csv:", 0) == 0) {
    const std::string path = game.substr(4);
    if (!std::filesystem::exists(path)) throw ConfigError("game csv does not exist: " + path);
    return load_meta_game(path, cfg.csv_antisymmetrize);
  }
  throw ConfigError("unknown game: " + game);
}

GameEngine build_engine(const ExperimentConfig& cfg) {
  if (cfg.game != "mixture") throw ConfigError("not an engine game: " + cfg.game);
  MixtureModelSpec spec = MixtureModelSpec::seven_gaussians(cfg.mixture_radius, cfg.mixture_variance);
  spec.normalize_weights = cfg.mixture_normalize;
  return mixture_engine(spec);
}

namespace {

void apply_trainer_json(const json& j, TrainerConfig& t, bool& schedule_explicit) {
  if (j.contains("iterations")) t.iterations = j.at("iterations").get<int>();
  if (j.contains("seed")) t.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("nash_epsilon")) t.nash_epsilon = j.at("nash_epsilon").get<double>();
  if (j.contains("early_termination")) t.early_termination = j.at("early_termination").get<bool>();
  if (j.contains("timing") && j.at("timing").get<std::string>() == "none") t.measure_time = false;
  if (j.contains("alpha")) t.alpha = j.at("alpha").get<double>();
  if (j.contains("population_m")) t.population_m = j.at("population_m").get<int>();
  if (j.contains("exploit_restarts")) t.exploit_restarts = j.at("exploit_restarts").get<int>();
  if (j.contains("tau")) {
    const auto& tj = j.at("tau");
    if (tj.is_number()) {
      t.tau = tj.get<double>();
    } else {
      if (tj.contains("value")) t.tau = tj.at("value").get<double>();
      if (tj.contains("schedule")) {
        schedule_explicit = true;
        const std::string s = tj.at("schedule").get<std::string>();
        if (s == "constant") t.tau_schedule = TauSchedule::constant;
        else if (s == "harmonic") t.tau_schedule = TauSchedule::harmonic;
        else if (s == "geometric") t.tau_schedule = TauSchedule::geometric;
        else throw ConfigError("unknown tau schedule: " + s);
      }
      if (tj.contains("decay")) t.tau_decay = tj.at("decay").get<double>();
    }
  }
  if (j.contains("oracle_options")) {
    const auto& oj = j.at("oracle_options");
    OracleConfig& oc = t.oracle_cfg;
    if (oj.contains("max_iters")) oc.max_iters = oj.at("max_iters").get<int>();
    if (oj.contains("step_size")) oc.step_size = oj.at("step_size").get<double>();
    if (oj.contains("restarts")) oc.restarts = oj.at("restarts").get<int>();
    if (oj.contains("tolerance")) oc.tolerance = oj.at("tolerance").get<double>();
    if (oj.contains("perturbation_std")) oc.perturbation_std = oj.at("perturbation_std").get<double>();
    if (oj.contains("perturbation_count")) oc.perturbation_count = oj.at("perturbation_count").get<int>();
    if (oj.contains("init_noise")) oc.init_noise = oj.at("init_noise").get<double>();
  }
}

}  // namespace

void ExperimentConfig::apply_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  try {
    if (j.contains("game")) game = j.at("game").get<std::string>();
    if (j.contains("solver")) solver = j.at("solver").get<std::string>();
    if (j.contains("oracle")) {
      if (j.at("oracle").is_string()) oracle = j.at("oracle").get<std::string>();
      else if (j.at("oracle").contains("kind")) oracle = j.at("oracle").at("kind").get<std::string>();
    }
    if (j.contains("players") && j.at("players").is_array()) {
      const auto& players = j.at("players");
      if (players.size() > 0 && players[0].contains("oracle"))
        oracle = players[0].at("oracle").get<std::string>();
      if (players.size() > 0 && players[0].contains("tau"))
        trainer.tau = players[0].at("tau").get<double>();
      if (players.size() > 1 && players[1].contains("oracle"))
        oracle_p2 = players[1].at("oracle").get<std::string>();
      if (players.size() > 1 && players[1].contains("tau"))
        trainer.tau_p2 = players[1].at("tau").get<double>();
    }
    if (j.contains("game_options")) {
      const auto& gj = j.at("game_options");
      if (gj.contains("blotto_areas")) blotto.areas = gj.at("blotto_areas").get<int>();
      if (gj.contains("blotto_coins")) blotto.coins = gj.at("blotto_coins").get<int>();
      if (gj.contains("mixture_variance")) mixture_variance = gj.at("mixture_variance").get<double>();
      if (gj.contains("mixture_radius")) mixture_radius = gj.at("mixture_radius").get<double>();
      if (gj.contains("mixture_normalize")) mixture_normalize = gj.at("mixture_normalize").get<bool>();
      if (gj.contains("csv_antisymmetrize")) csv_antisymmetrize = gj.at("csv_antisymmetrize").get<bool>();
    }
    apply_trainer_json(j, trainer, tau_schedule_explicit);
    if (j.contains("output")) {
      const auto& oj = j.at("output");
      if (oj.is_string()) {
        output_path = oj.get<std::string>();
      } else {
        if (oj.contains("path")) output_path = oj.at("path").get<std::string>();
        if (oj.contains("svg")) {
          emit_svg = oj.at("svg").is_boolean() ? oj.at("svg").get<bool>() : true;
          if (oj.at("svg").is_string()) svg_path = oj.at("svg").get<std::string>();
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg;
  cfg.apply_json(ss.str());
  return cfg;
}

int run_experiment(const ExperimentConfig& cfg) {
  std::vector<IterationTrace> trace;
  int status = 0;
  try {
    TrainerConfig tcfg = cfg.trainer;
    tcfg.oracle = parse_oracle(cfg.oracle);
    if (!cfg.oracle_p2.empty()) tcfg.oracle_p2 = parse_oracle(cfg.oracle_p2);

    if (solver_is_fp(cfg.solver)) {
      if (game_is_engine(cfg.game)) throw ConfigError("fictitious play requires a normal-form game");
      if (tcfg.oracle != OracleKind::br && tcfg.oracle != OracleKind::diverse_br)
        throw ConfigError("fictitious play supports only br and diverse_br oracles");
      if (tcfg.oracle == OracleKind::br) tcfg.tau = 0.0;
      if (!cfg.tau_schedule_explicit) tcfg.tau_schedule = TauSchedule::harmonic;
      const PayoffMatrix g = build_nfg(cfg);
      FpResult result = run_diverse_fp(g, tcfg);
      trace = std::move(result.trace);
    } else if (game_is_engine(cfg.game)) {
      tcfg.meta_solver = parse_meta_solver(cfg.solver);
      const GameEngine engine = build_engine(cfg);
      EnginePsroResult result = run_psro(engine, tcfg, initial_population(engine, tcfg.seed));
      trace = std::move(result.trace);
    } else {
      tcfg.meta_solver = parse_meta_solver(cfg.solver);
      const PayoffMatrix g = build_nfg(cfg);
      PsroResult result = run_psro(g, tcfg, initial_population(g, tcfg.seed));
      trace = std::move(result.trace);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "convergence error: %s (achieved %.12g)\n", e.what(), e.achieved());
    status = 3;
  }
  write_trace_csv(cfg.output_path, trace);
  if (cfg.emit_svg) {
    const std::string svg = cfg.svg_path.empty()
                                ? (cfg.output_path.size() > 4 &&
                                           cfg.output_path.substr(cfg.output_path.size() - 4) == ".csv"
                                       ? cfg.output_path.substr(0, cfg.output_path.size() - 4) + ".svg"
                                       : cfg.output_path + ".svg")
                                : cfg.svg_path;
    write_trace_svg(svg, trace);
  }
  return status;
}

}  // namespace metasolve
