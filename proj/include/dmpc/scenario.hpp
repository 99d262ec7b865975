#pragma once

#include <string>
#include <vector>

#include "dmpc/collision.hpp"
#include "dmpc/coordination.hpp"
#include "dmpc/kinematics.hpp"
#include "dmpc/ocp.hpp"
#include "dmpc/panoc.hpp"
#include "dmpc/path_geometry.hpp"
#include "dmpc/penalty.hpp"

namespace dmpc {

struct AgentConfig {
  int id = 0;
  std::vector<Waypoint> waypoints;
  double drivetrain_time_constant = 0.3;  // T_ax [s]
  AgentGeometry geometry;
  AgentLimits limits;
  CostWeights weights;
  SafetyParams safety;
  RegionBoundaries regions;
  int priority = 1;
  AgentState initial;  // s along the path, v, a_x
  double v_ref = 0.0;
};

struct ScenarioConfig {
  std::string name;
  double sampling_time = 0.1;
  int horizon = 50;
  /// Added to every basic safety distance inside the planner only, so that
  /// a solution accepted at the penalty tolerance still clears the nominal region.
  double collision_margin = 0.1;  // [m]
  PenaltyConfig penalty;
  SolverConfig solver;
  LaneConfig lane;
  std::vector<AgentConfig> agents;

  const AgentConfig &agent(int id) const;
  PriorityMap priorities() const;
};

/// Throws ValidationError naming the first violated invariant.
void validate(const ScenarioConfig &cfg);

/// Parses the YAML scenario format and validates it. Throws ParseError
/// (with line and field) or ValidationError.
ScenarioConfig parse_scenario(const std::string &text);
ScenarioConfig load_scenario(const std::string &path);

/// Inverse of parse_scenario.
std::string serialize_scenario(const ScenarioConfig &cfg);

}  // namespace dmpc
