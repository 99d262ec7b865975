#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dmpc {

struct AgentDynamicsParams {
  double drivetrain_time_constant = 0.3;  // T_ax [s]
  double sampling_time = 0.1;             // T_s [s]

  bool valid() const;
};

/// Longitudinal state of one vehicle: lagged acceleration, speed and
/// position along its own path.
struct AgentState {
  double a_x = 0.0;  // [m/s^2]
  double v = 0.0;    // [m/s]
  double s = 0.0;    // [m]

  Eigen::Vector3d vec() const { return {a_x, v, s}; }
  static AgentState from(const Eigen::Vector3d &x) { return {x[0], x[1], x[2]}; }
};

struct ContinuousModel {
  Eigen::Matrix3d A;
  Eigen::Vector3d B;
};

/// Zero-order-hold discretization x+ = A x + B u.
struct DiscreteModel {
  Eigen::Matrix3d A;
  Eigen::Vector3d B;
};

/// First-order drivetrain lag feeding a double integrator.
ContinuousModel continuous_matrices(const AgentDynamicsParams &params);

/// Exact ZOH discretization of a model with the drivetrain/integrator
/// structure produced by continuous_matrices(). Uses the closed form of the
/// matrix exponential; throws std::invalid_argument for any other structure
/// or for a negative sampling time.
DiscreteModel discretize_exact(const ContinuousModel &model, double sampling_time);

DiscreteModel discretize(const AgentDynamicsParams &params);

/// States x_0..x_N for inputs u_0..u_{N-1}; element 0 is x0.
std::vector<AgentState> rollout(const DiscreteModel &model, const AgentState &x0,
                                std::span<const double> u);

/// Allocation-free variant used inside the solver. `out` must hold u.size()+1.
void rollout_into(const DiscreteModel &model, const AgentState &x0,
                  std::span<const double> u, std::span<AgentState> out);

}  // namespace dmpc
