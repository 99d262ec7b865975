#include "dmpc/sim.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "dmpc/errors.hpp"

namespace dmpc {

std::vector<Pose2D> message_shift(const TrajectoryMessage &msg, double sampling_time) {
  std::vector<Pose2D> out(msg.poses.begin() + 1, msg.poses.end());
  Pose2D last = msg.poses.back();
  last.x += last.v * sampling_time * std::cos(last.psi);
  last.y += last.v * sampling_time * std::sin(last.psi);
  out.push_back(last);
  return out;
}

TrajectoryMessage bootstrap_message(int sender, const Pose2D &pose, int horizon,
                                    double sampling_time) {
  TrajectoryMessage msg{sender, -1, {}};
  msg.poses.reserve(static_cast<std::size_t>(horizon) + 1);
  for (int j = 0; j <= horizon; ++j) {
    const double d = pose.v * sampling_time * (j - 1);
    msg.poses.push_back({pose.x + d * std::cos(pose.psi), pose.y + d * std::sin(pose.psi),
                         pose.psi, pose.v});
  }
  return msg;
}

Simulator::Simulator(ScenarioConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_);
  for (const auto &a : cfg_.agents) {
    paths_.push_back(PathSpline::fit(a.waypoints));
    models_.push_back(discretize({a.drivetrain_time_constant, cfg_.sampling_time}));
  }
  priorities_ = cfg_.priorities();
  ahead_static_ = static_ahead_sets(snapshots(initial_world()), cfg_.lane);
}

std::size_t Simulator::agent_index(int id) const {
  for (std::size_t i = 0; i < cfg_.agents.size(); ++i)
    if (cfg_.agents[i].id == id)
      return i;
  throw std::out_of_range("unknown agent " + std::to_string(id));
}

WorldState Simulator::initial_world() const {
  WorldState w;
  for (std::size_t i = 0; i < cfg_.agents.size(); ++i) {
    const AgentState x0 = cfg_.agents[i].initial;
    w.states.push_back(x0);
    w.mailbox.push_back(bootstrap_message(cfg_.agents[i].id, pose_on_path(paths_[i], x0),
                                          cfg_.horizon, cfg_.sampling_time));
    w.warm_start.emplace_back(static_cast<std::size_t>(cfg_.horizon), 0.0);
  }
  return w;
}

std::vector<AgentSnapshot> Simulator::snapshots(const WorldState &world) const {
  std::vector<AgentSnapshot> out;
  for (std::size_t i = 0; i < cfg_.agents.size(); ++i)
    out.push_back({cfg_.agents[i].id, world.states[i].s, &paths_[i], cfg_.agents[i].regions});
  return out;
}

OcpProblem Simulator::build_problem(const WorldState &world, std::size_t index,
                                    ConflictSets *sets) const {
  const AgentConfig &a = cfg_.agents[index];
  const auto snaps = snapshots(world);
  const auto it = ahead_static_.find(a.id);
  const ConflictSets cs = active_conflict_set(a.id, snaps, priorities_,
                                              it == ahead_static_.end() ? AgentSet{} : it->second,
                                              cfg_.lane);
  if (sets)
    *sets = cs;

  OcpSetup setup;
  setup.model = models_[index];
  setup.path = &paths_[index];
  setup.weights = a.weights;
  setup.limits = a.limits;
  setup.safety = a.safety;
  setup.safety.d_xf += cfg_.collision_margin;
  setup.safety.d_xr += cfg_.collision_margin;
  setup.safety.d_yl += cfg_.collision_margin;
  setup.safety.d_yr += cfg_.collision_margin;
  setup.geometry = a.geometry;
  setup.regions = a.regions;
  setup.horizon = cfg_.horizon;
  setup.v_ref = a.v_ref;
  setup.effective_s_cr_out = liveness_update(cs.prioritized_active, a.regions.s_cr_out);

  ParameterVector params;
  params.x0 = world.states[index];
  for (int id : cs.active) {
    const std::size_t l = agent_index(id);
    const TrajectoryMessage &msg = world.mailbox[l];
    if (msg.k != world.k - 1 || msg.poses.size() != static_cast<std::size_t>(cfg_.horizon) + 1)
      throw MissingTrajectory("agent " + std::to_string(a.id) + " has no current message from " +
                              std::to_string(id));
    params.conflicts.push_back({id, cfg_.agents[l].geometry, message_shift(msg, cfg_.sampling_time)});
  }
  return OcpProblem(std::move(setup), std::move(params));
}

SolverResult Simulator::solve_agent(const OcpProblem &problem,
                                    std::span<const double> warm_start) const {
  const BoxSet box = problem.input_box();
  SolverResult res = penalty_outer_loop(problem, box, warm_start, cfg_.penalty, cfg_.solver);
  const OcpSetup &setup = problem.setup();
  if (setup.effective_s_cr_out <= 0.0 || problem.parameters().x0.s >= setup.regions.s_stop)
    return res;

  // The preview constraint is a disjunction and the conditional penalty has a
  // ridge between its two basins. Also solve the stop branch alone, from a
  // full-braking start, and keep whichever is better on the actual problem.
  OcpSetup stop = setup;
  stop.preview_mode = PreviewMode::Stop;
  const OcpProblem branch(std::move(stop), problem.parameters());
  const std::vector<double> brake(problem.dimension(), setup.limits.a_x_min);
  SolverResult alt = penalty_outer_loop(branch, box, brake, cfg_.penalty, cfg_.solver);
  std::vector<double> viol(problem.num_constraints());
  problem.violations(alt.u_opt, viol);
  alt.max_violation = 0.0;
  for (double r : viol)
    alt.max_violation = std::max(alt.max_violation, r * r);

  const bool ok = res.max_violation < cfg_.penalty.tolerance;
  const bool alt_ok = alt.max_violation < cfg_.penalty.tolerance;
  bool take_alt;
  if (ok != alt_ok)
    take_alt = alt_ok;
  else if (ok)
    take_alt = problem.objective(alt.u_opt) < problem.objective(res.u_opt);
  else
    take_alt = alt.max_violation < res.max_violation;
  SolverResult &best = take_alt ? alt : res;
  best.inner_iterations = res.inner_iterations + alt.inner_iterations;
  best.outer_iterations = res.outer_iterations + alt.outer_iterations;
  if (take_alt)
    alt.fbe_runs.insert(alt.fbe_runs.begin(), res.fbe_runs.begin(), res.fbe_runs.end());
  return std::move(best);
}

std::vector<StepRecord> Simulator::step(WorldState &world) const {
  const std::size_t n_agents = cfg_.agents.size();
  const std::size_t n = static_cast<std::size_t>(cfg_.horizon);
  std::vector<StepRecord> records(n_agents);
  std::vector<TrajectoryMessage> outbox(n_agents);
  std::vector<std::vector<double>> plans(n_agents);

  for (std::size_t i = 0; i < n_agents; ++i) {
    ConflictSets cs;
    const OcpProblem problem = build_problem(world, i, &cs);
    const auto t0 = std::chrono::steady_clock::now();
    SolverResult res = solve_agent(problem, world.warm_start[i]);
    const auto t1 = std::chrono::steady_clock::now();
    for (double v : res.u_opt)
      if (!std::isfinite(v))
        throw SolverFailure("non-finite solution for agent " + std::to_string(cfg_.agents[i].id) +
                                " at step " + std::to_string(world.k),
                            cfg_.agents[i].id, world.k);

    const auto traj = problem.trajectory(res.u_opt);
    TrajectoryMessage &msg = outbox[i];
    msg.sender = cfg_.agents[i].id;
    msg.k = world.k;
    for (const auto &x : traj)
      msg.poses.push_back(pose_on_path(paths_[i], x));

    StepRecord &rec = records[i];
    rec.k = world.k;
    rec.agent_id = cfg_.agents[i].id;
    rec.state = world.states[i];
    rec.pose = msg.poses.front();
    rec.u = res.u_opt.front();
    rec.region = region_of(rec.state.s, cfg_.agents[i].regions);
    rec.active.assign(cs.active.begin(), cs.active.end());
    rec.solve_time_ms =
        record_timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
    rec.inner_iterations = res.inner_iterations;
    rec.outer_iterations = res.outer_iterations;
    rec.max_violation = res.max_violation;
    rec.status = res.status;
    for (const auto &run : res.fbe_runs)
      for (std::size_t j = 1; j < run.size(); ++j)
        if (run[j] > run[j - 1] + 1e-12 * std::max(1.0, std::abs(run[j - 1])))
          ++rec.fbe_increases;
    const double preview = problem.residuals(res.u_opt).preview;
    rec.preview_violation = preview * preview;
    rec.effective_s_cr_out = problem.setup().effective_s_cr_out;
    const Pose2D applied = msg.poses[1];
    for (const auto &c : problem.parameters().conflicts)
      rec.min_clearance = std::min(
          rec.min_clearance, region_clearance(applied, cfg_.agents[i].geometry,
                                              cfg_.agents[i].safety, c.poses[1], c.geometry));
    plans[i] = std::move(res.u_opt);
  }

  // Barrier: apply inputs, swap the mailbox, shift warm starts.
  for (std::size_t i = 0; i < n_agents; ++i) {
    const auto next = rollout(models_[i], world.states[i], std::span(plans[i]).first(1));
    world.states[i] = next[1];
    auto &warm = world.warm_start[i];
    std::copy(plans[i].begin() + 1, plans[i].end(), warm.begin());
    warm[n - 1] = plans[i].back();
  }
  for (std::size_t i = 0; i < n_agents; ++i) {
    const Pose2D ego = pose_on_path(paths_[i], world.states[i]);
    for (int id : records[i].active) {
      const std::size_t l = agent_index(id);
      const double c =
          region_clearance(ego, cfg_.agents[i].geometry, cfg_.agents[i].safety,
                           pose_on_path(paths_[l], world.states[l]), cfg_.agents[l].geometry);
      records[i].true_clearance = std::min(records[i].true_clearance, c);
    }
  }
  world.mailbox = std::move(outbox);
  ++world.k;
  return records;
}

Trace Simulator::run(int n_steps) const {
  Trace trace;
  WorldState world = initial_world();
  for (int k = 0; k < n_steps; ++k)
    trace.push_back(step(world));
  return trace;
}

std::vector<CollisionEvent> detect_actual_collision(const Trace &trace,
                                                    const ScenarioConfig &cfg) {
  std::vector<CollisionEvent> out;
  for (const auto &records : trace)
    for (std::size_t a = 0; a < records.size(); ++a)
      for (std::size_t b = a + 1; b < records.size(); ++b) {
        const auto &ra = records[a];
        const auto &rb = records[b];
        const double area = footprint_overlap(ra.pose, cfg.agent(ra.agent_id).geometry, rb.pose,
                                              cfg.agent(rb.agent_id).geometry);
        if (area > 0.0)
          out.push_back({ra.k, ra.agent_id, rb.agent_id, area});
      }
  return out;
}

}  // namespace dmpc
