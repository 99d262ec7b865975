#include "dmpc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <yaml-cpp/yaml.h>

#include "dmpc/errors.hpp"
#include "dmpc/scenario.hpp"
#include "dmpc/sim.hpp"
#include "dmpc/trace.hpp"

namespace dmpc {
namespace {

void write_summary(const Trace &trace, const ScenarioConfig &cfg, std::ostream &out) {
  const auto collisions = detect_actual_collision(trace, cfg);
  out << "steps: " << trace.size() << "\n";
  out << "collisions: " << collisions.size() << "\n";
  std::vector<double> times;
  for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
    double v_min = 1e300, v_max = -1e300, clearance = 1e300, true_clearance = 1e300;
    for (const auto &step : trace) {
      const StepRecord &r = step[i];
      v_min = std::min(v_min, r.state.v);
      v_max = std::max(v_max, r.state.v);
      clearance = std::min(clearance, r.min_clearance);
      true_clearance = std::min(true_clearance, r.true_clearance);
      times.push_back(r.solve_time_ms);
    }
    out << "agent " << cfg.agents[i].id << ": v_min " << v_min << " v_max " << v_max
        << " min_clearance " << clearance << " true_clearance " << true_clearance << "\n";
  }
  if (!times.empty()) {
    std::sort(times.begin(), times.end());
    out << "solve_time_ms: median " << times[times.size() / 2] << " max " << times.back()
        << "\n";
  }
}

/// Reads per-agent states {id: {s, v, a_x}} and an optional step index k.
WorldState read_step_state(const std::string &path, const Simulator &sim) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile &) {
    throw IoError("cannot open step-state file " + path);
  } catch (const YAML::ParserException &e) {
    throw ParseError(e.what(), e.mark.line + 1, "");
  }
  WorldState w = sim.initial_world();
  if (root["states"]) {
    for (const auto &kv : root["states"]) {
      const std::size_t i = sim.agent_index(kv.first.as<int>());
      AgentState &x = w.states[i];
      x.s = kv.second["s"].as<double>(x.s);
      x.v = kv.second["v"].as<double>(x.v);
      x.a_x = kv.second["a_x"].as<double>(x.a_x);
    }
  }
  const ScenarioConfig &cfg = sim.config();
  for (std::size_t i = 0; i < w.states.size(); ++i)
    w.mailbox[i] = bootstrap_message(cfg.agents[i].id, pose_on_path(sim.path(i), w.states[i]),
                                     cfg.horizon, cfg.sampling_time);
  return w;
}

}  // namespace

int cli_main(int argc, char **argv) {
  CLI::App app{"Distributed NMPC intersection simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, state_path;
  int steps = 300, agent_id = 0;
  bool no_timing = false;

  auto *run = app.add_subcommand("run", "Simulate a scenario and write trace + summary");
  run->add_option("--scenario", scenario_path, "Scenario file")->required();
  run->add_option("--steps", steps, "Number of steps")->check(CLI::NonNegativeNumber);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--no-timing", no_timing, "Write zero solve times (reproducible traces)");

  auto *val = app.add_subcommand("validate", "Parse and validate a scenario");
  val->add_option("--scenario", scenario_path, "Scenario file")->required();

  auto *once = app.add_subcommand("solve-once", "Solve one agent's problem and print diagnostics");
  once->add_option("--scenario", scenario_path, "Scenario file")->required();
  once->add_option("--agent", agent_id, "Agent id")->required();
  once->add_option("--step-state", state_path, "YAML file with per-agent states")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const ScenarioConfig cfg = load_scenario(scenario_path);
    if (*val) {
      std::cout << "ok: " << cfg.name << " (" << cfg.agents.size() << " agents)\n";
      return 0;
    }
    Simulator sim(cfg);
    if (*run) {
      sim.record_timing = !no_timing;
      std::filesystem::create_directories(out_dir);
      const Trace trace = sim.run(steps);
      write_trace(trace, cfg.sampling_time, out_dir + "/trace.csv");
      std::ofstream summary(out_dir + "/summary.txt");
      write_summary(trace, cfg, summary);
      write_summary(trace, cfg, std::cout);
      return 0;
    }
    const WorldState world = read_step_state(state_path, sim);
    const std::size_t i = sim.agent_index(agent_id);
    ConflictSets cs;
    const OcpProblem problem = sim.build_problem(world, i, &cs);
    const SolverResult res = sim.solve_agent(problem, world.warm_start[i]);
    std::cout << "status: " << to_string(res.status) << "\n"
              << "outer_iterations: " << res.outer_iterations << "\n"
              << "inner_iterations: " << res.inner_iterations << "\n"
              << "fixed_point_residual: " << res.fixed_point_residual << "\n"
              << "max_violation: " << res.max_violation << "\n"
              << "active:";
    for (int id : cs.active)
      std::cout << ' ' << id;
    std::cout << "\nu0: " << res.u_opt.front() << "\n";
    const auto traj = problem.trajectory(res.u_opt);
    std::cout << "s_N: " << traj.back().s << " v_N: " << traj.back().v << "\n";
    return 0;
  } catch (const SolverFailure &e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dmpc
