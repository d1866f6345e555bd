#pragma once

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nestfix/encodings.hpp"
#include "nestfix/errors.hpp"
#include "nestfix/formats.hpp"
#include "nestfix/mucalc.hpp"
#include "nestfix/solver.hpp"

namespace nestfix {
namespace cli {

enum class Algo { lifting, chained, kleene, zielonka };
enum class TreeKind { succinct, complete };

struct RunConfig {
  Algo algo = Algo::lifting;
  TreeKind tree = TreeKind::succinct;
  uint32_t height = 0;  // 0 = default max(1, ceil(d/2))
  uint64_t chained_cap = 1'000'000;
  bool json = false;
  bool stats = false;
  uint64_t seed = 1;
  std::string sweep = "forward";
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitParse = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitLimit = 3;
inline constexpr uint64_t kTreeLeafCap = uint64_t{1} << 24;

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline LiftOptions lift_options(const RunConfig& cfg) {
  LiftOptions opts;
  if (cfg.sweep == "forward")
    opts.order = SweepOrder::forward;
  else if (cfg.sweep == "backward")
    opts.order = SweepOrder::backward;
  else if (cfg.sweep == "shuffled")
    opts.order = SweepOrder::shuffled;
  else if (cfg.sweep == "jacobi")
    opts.jacobi = true;
  else
    throw ValidationError("unknown sweep order: " + cfg.sweep);
  opts.shuffle_seed = cfg.seed;
  return opts;
}

template <Lattice L>
std::pair<std::vector<typename L::Element>, SolveStats> run_equation_solver(
    const EquationSystem<L>& sys, const RunConfig& cfg) {
  if (cfg.algo == Algo::kleene) {
    return {kleene_solve_all(sys), SolveStats{}};
  }
  auto [l, h_default] = default_tree_params(sys);
  uint32_t h = cfg.height ? cfg.height : h_default;
  if (2 * h < static_cast<uint32_t>(sys.depth()))
    throw ValidationError("tree height " + std::to_string(h) + " too small for alternation depth " +
                          std::to_string(sys.depth()));
  LeafTable table;
  if (cfg.tree == TreeKind::succinct) {
    SuccinctTree t(l, h);
    if (t.size() > kTreeLeafCap) throw SizeLimitError("universal tree too large: " + std::to_string(t.size()));
    table = compile_tree(t, sys.depth());
  } else {
    CompleteTree t(l, h);
    if (t.size() > kTreeLeafCap) throw SizeLimitError("universal tree too large: " + std::to_string(t.size()));
    table = compile_tree(t, sys.depth());
  }
  if (cfg.algo == Algo::lifting) {
    auto res = lift_solve(sys, table, lift_options(cfg));
    return {std::move(res.solutions), res.stats};
  }
  auto res = chained_solve(sys, table, cfg.chained_cap);
  return {std::move(res.solutions), res.stats};
}

inline nlohmann::ordered_json stats_json(const SolveStats& s) {
  nlohmann::ordered_json j;
  j["lift_calls"] = s.lift_calls;
  j["sweeps"] = s.sweeps;
  j["tree_size"] = s.tree_size;
  j["bound"] = s.bound;
  return j;
}

inline void emit(std::ostream& out, const RunConfig& cfg, const nlohmann::ordered_json& result,
                 const SolveStats& stats, const std::string& text) {
  if (cfg.json) {
    nlohmann::ordered_json j;
    j["result"] = result;
    j["stats"] = stats_json(stats);
    out << j.dump() << "\n";
  } else {
    out << text;
    if (cfg.stats) {
      out << "stats: lift_calls=" << stats.lift_calls << " sweeps=" << stats.sweeps
          << " tree_size=" << stats.tree_size << " bound=" << stats.bound << "\n";
    }
  }
}

// Shared by solve-pg and solve-prob: report the two regions.
template <typename IdOf>
void emit_regions(std::ostream& out, const RunConfig& cfg, const Bitset& win_eloise, int n,
                  const SolveStats& stats, IdOf&& id_of) {
  nlohmann::ordered_json result;
  auto we = nlohmann::ordered_json::array();
  auto wa = nlohmann::ordered_json::array();
  std::ostringstream text;
  text << "win_eloise:";
  for (int v = 0; v < n; ++v)
    if (win_eloise.test(static_cast<uint32_t>(v))) {
      we.push_back(id_of(v));
      text << ' ' << id_of(v);
    }
  text << "\nwin_abelard:";
  for (int v = 0; v < n; ++v)
    if (!win_eloise.test(static_cast<uint32_t>(v))) {
      wa.push_back(id_of(v));
      text << ' ' << id_of(v);
    }
  text << "\n";
  result["win_eloise"] = we;
  result["win_abelard"] = wa;
  emit(out, cfg, result, stats, text.str());
}

inline int cmd_solve_pg(const std::string& path, const RunConfig& cfg, std::ostream& out) {
  ParityGame g = parse_pgsolver(detail::read_file(path));
  Bitset win(static_cast<uint32_t>(g.size()));
  SolveStats stats;
  if (cfg.algo == Algo::zielonka) {
    win = zielonka_solve(g).win_eloise;
  } else {
    auto sys = parity_system(g);
    auto [solutions, s] = run_equation_solver(sys, cfg);
    stats = s;
    win = solutions.back();
  }
  emit_regions(out, cfg, win, g.size(), stats, [&](int v) { return g.display_id(v); });
  return kExitOk;
}

inline int cmd_solve_prob(const std::string& path, const RunConfig& cfg, std::ostream& out) {
  ProbabilisticGame g = parse_prob(detail::read_file(path));
  auto sys = prob_system(g);
  auto [solutions, stats] = run_equation_solver(sys, cfg);
  emit_regions(out, cfg, solutions.back(), static_cast<int>(g.nodes.size()), stats,
               [&](int v) { return g.display_id(v); });
  return kExitOk;
}

inline int cmd_solve_energy(const std::string& path, const RunConfig& cfg, std::ostream& out) {
  EnergyGame g = parse_energy(detail::read_file(path));
  auto sys = energy_system(g);
  auto [solutions, stats] = run_equation_solver(sys, cfg);
  auto credits = energy_credits(g, solutions.back());
  long long b = g.credit_bound();

  nlohmann::ordered_json result;
  result["bound"] = b;
  nlohmann::ordered_json cj = nlohmann::ordered_json::object();
  std::ostringstream text;
  text << "bound: " << b << "\n";
  for (size_t v = 0; v < credits.size(); ++v) {
    std::string key = std::to_string(g.game.display_id(static_cast<int>(v)));
    cj[key] = credits[v];
    text << key << ": ";
    if (credits[v] > b)
      text << "lose\n";
    else
      text << credits[v] << "\n";
  }
  result["credits"] = cj;
  emit(out, cfg, result, stats, text.str());
  return kExitOk;
}

inline int cmd_mc(const std::string& model_path, const std::string& formula_path, const RunConfig& cfg,
                  std::ostream& out) {
  mucalc::Model model = parse_model(detail::read_file(model_path));
  mucalc::FormulaPtr chi = parse_formula(detail::read_file(formula_path));
  auto mc = mucalc::make_model_checker(model, chi);
  auto sys = mucalc::alpha_mc_system(mc);
  auto [solutions, stats] = run_equation_solver(sys, cfg);
  Bitset truth = mucalc::truth_from_solution(mc, solutions.back());

  nlohmann::ordered_json result;
  auto holds = nlohmann::ordered_json::array();
  std::ostringstream text;
  text << "holds:";
  truth.for_each([&](uint32_t x) {
    holds.push_back(model.states[x]);
    text << ' ' << model.states[x];
  });
  text << "\n";
  result["holds"] = holds;
  emit(out, cfg, result, stats, text.str());
  return kExitOk;
}

inline int cmd_solve_bes(const std::string& path, const RunConfig& cfg, std::ostream& out) {
  BesSystem bes = parse_bes(detail::read_file(path));
  auto sys = bes_system(bes);
  auto [solutions, stats] = run_equation_solver(sys, cfg);

  nlohmann::ordered_json result;
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  std::ostringstream text;
  for (size_t i = 0; i < bes.variables.size(); ++i) {
    bool truth = solutions[i].any();
    values[bes.variables[i]] = truth;
    text << bes.variables[i] << " = " << (truth ? "tt" : "ff") << "\n";
  }
  result["values"] = values;
  emit(out, cfg, result, stats, text.str());
  return kExitOk;
}

}  // namespace detail

// Full command dispatch; returns the process exit code. Streams are injected
// so the test suite can drive it in-process.
inline int run_command(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"nested fixpoint equation solver"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string algo = "lifting", tree = "succinct";
  auto add_common = [&](CLI::App* sub, bool with_zielonka) {
    sub->add_option("--algo", algo, "solver backend")
        ->check(CLI::IsMember(with_zielonka
                                  ? std::vector<std::string>{"lifting", "chained", "kleene", "zielonka"}
                                  : std::vector<std::string>{"lifting", "chained", "kleene"}));
    sub->add_option("--tree", tree, "universal tree flavor")
        ->check(CLI::IsMember(std::vector<std::string>{"succinct", "complete"}));
    sub->add_option("--height", cfg.height, "tree height override (default ceil(d/2))");
    sub->add_option("--chained-cap", cfg.chained_cap, "size cap for the chained product");
    sub->add_flag("--json", cfg.json, "emit JSON {result, stats}");
    sub->add_flag("--stats", cfg.stats, "include solver statistics in text output");
    sub->add_option("--seed", cfg.seed, "seed for the shuffled sweep order");
    sub->add_option("--sweep", cfg.sweep, "lifting sweep schedule")
        ->check(CLI::IsMember(std::vector<std::string>{"forward", "backward", "shuffled", "jacobi"}));
  };

  std::string input, formula_path;
  auto* pg = app.add_subcommand("solve-pg", "solve a PGSolver parity game");
  pg->add_option("file", input, "game file")->required();
  add_common(pg, true);
  auto* en_cmd = app.add_subcommand("solve-energy", "minimal initial credits of an energy parity game");
  en_cmd->add_option("file", input, "game file")->required();
  add_common(en_cmd, false);
  auto* prob = app.add_subcommand("solve-prob", "solve a probabilistic parity game");
  prob->add_option("file", input, "game file")->required();
  add_common(prob, false);
  auto* mc = app.add_subcommand("mc", "model check a mu-calculus formula");
  mc->add_option("model", input, "model JSON file")->required();
  mc->add_option("formula", formula_path, "formula file")->required();
  add_common(mc, false);
  auto* bes = app.add_subcommand("solve-bes", "solve a boolean equation system");
  bes->add_option("file", input, "equation file")->required();
  add_common(bes, false);

  std::vector<const char*> argv;
  argv.push_back("nestfix");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and friends.
      std::ostringstream help;
      int code = app.exit(e, help, help);
      out << help.str();
      return code;
    }
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }

  cfg.algo = algo == "lifting"   ? Algo::lifting
             : algo == "chained" ? Algo::chained
             : algo == "kleene"  ? Algo::kleene
                                 : Algo::zielonka;
  cfg.tree = tree == "succinct" ? TreeKind::succinct : TreeKind::complete;

  try {
    if (pg->parsed()) return detail::cmd_solve_pg(input, cfg, out);
    if (en_cmd->parsed()) return detail::cmd_solve_energy(input, cfg, out);
    if (prob->parsed()) return detail::cmd_solve_prob(input, cfg, out);
    if (mc->parsed()) return detail::cmd_mc(input, formula_path, cfg, out);
    if (bes->parsed()) return detail::cmd_solve_bes(input, cfg, out);
    err << "error: no command\n";
    return kExitParse;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const SizeLimitError& e) {
    err << "limit exceeded: " << e.what() << "\n";
    return kExitLimit;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 70;
  }
}

}  // namespace cli
}  // namespace nestfix
