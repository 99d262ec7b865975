#pragma once

#include <limits>
#include <vector>

#include "dmpc/coordination.hpp"
#include "dmpc/ocp.hpp"
#include "dmpc/scenario.hpp"

namespace dmpc {

/// Predicted poses broadcast by one agent after solving at time k;
/// poses[j] belongs to time k + j, j = 0..N.
struct TrajectoryMessage {
  int sender = 0;
  int k = 0;
  std::vector<Pose2D> poses;
};

/// Re-indexes a message from k-1 onto the horizon of time k: the first
/// sample is dropped and the last pose is advanced by v * T_s along its
/// heading. Element j of the result belongs to time k + j.
std::vector<Pose2D> message_shift(const TrajectoryMessage &msg, double sampling_time);

/// Constant-velocity straight-line message stamped k = -1, used before any
/// agent has solved.
TrajectoryMessage bootstrap_message(int sender, const Pose2D &pose, int horizon,
                                    double sampling_time);

struct WorldState {
  int k = 0;
  std::vector<AgentState> states;          // scenario agent order
  std::vector<TrajectoryMessage> mailbox;  // stamped k - 1
  std::vector<std::vector<double>> warm_start;
};

struct StepRecord {
  int k = 0;
  int agent_id = 0;
  AgentState state;  // measured x_k
  Pose2D pose;       // x_k mapped through the path
  double u = 0.0;    // applied input
  RegionTag region = RegionTag::OutsideBefore;
  std::vector<int> active;
  double solve_time_ms = 0.0;
  int inner_iterations = 0;
  int outer_iterations = 0;
  double max_violation = 0.0;  // max_s psi_s / beta_s
  SolveStatus status = SolveStatus::Converged;
  /// Envelope increases within constant-step runs; counted only when the
  /// solver records the envelope.
  int fbe_increases = 0;
  double preview_violation = 0.0;  // (preview residual)^2 of the returned plan
  double effective_s_cr_out = 0.0;
  /// Smallest signed distance between this agent's safety region at the
  /// applied state x_{k+1} and the boxes of its active conflicts at their
  /// broadcast poses for time k+1 (the quantity the planner constrains).
  double min_clearance = std::numeric_limits<double>::infinity();
  /// Same, against the conflicts' actual states at k+1.
  double true_clearance = std::numeric_limits<double>::infinity();
};

using Trace = std::vector<std::vector<StepRecord>>;  // [step][agent]

struct CollisionEvent {
  int k = 0;
  int agent_a = 0;
  int agent_b = 0;
  double area = 0.0;
};

/// Pairwise footprint overlaps over a trace; empty means collision-free.
std::vector<CollisionEvent> detect_actual_collision(const Trace &trace,
                                                    const ScenarioConfig &cfg);

class Simulator {
public:
  explicit Simulator(ScenarioConfig cfg);

  WorldState initial_world() const;
  /// Solves every agent on the same snapshot, then advances all of them.
  /// Throws SolverFailure on a non-finite solution.
  std::vector<StepRecord> step(WorldState &world) const;
  Trace run(int n_steps) const;

  /// The problem agent `index` would solve in `world`, plus its conflict sets.
  OcpProblem build_problem(const WorldState &world, std::size_t index,
                           ConflictSets *sets = nullptr) const;

  const ScenarioConfig &config() const { return cfg_; }
  const PathSpline &path(std::size_t index) const { return paths_[index]; }
  const DiscreteModel &model(std::size_t index) const { return models_[index]; }
  std::size_t agent_index(int id) const;
  /// Disables wall-clock measurement so traces are reproducible byte for byte.
  bool record_timing = true;

  /// Penalty solve from the warm start; while the agent can still stop
  /// before its stop line under an active preview constraint, also the stop
  /// branch from a full-braking start, keeping the better result.
  SolverResult solve_agent(const OcpProblem &problem, std::span<const double> warm_start) const;

private:
  std::vector<AgentSnapshot> snapshots(const WorldState &world) const;

  ScenarioConfig cfg_;
  std::vector<PathSpline> paths_;
  std::vector<DiscreteModel> models_;
  PriorityMap priorities_;
  std::map<int, AgentSet> ahead_static_;
};

}  // namespace dmpc
