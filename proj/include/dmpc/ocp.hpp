#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dmpc/collision.hpp"
#include "dmpc/coordination.hpp"
#include "dmpc/kinematics.hpp"
#include "dmpc/path_geometry.hpp"
#include "dmpc/penalty.hpp"

namespace dmpc {

struct CostWeights {
  double q = 1.0;    // speed tracking
  double q_n = 1.0;  // terminal speed tracking
  double r = 10.0;   // input

  bool valid() const { return q > 0.0 && q_n > 0.0 && r > 0.0; }
};

struct AgentLimits {
  double a_x_min = -7.0;
  double a_x_max = 4.0;
  double v_max = 15.0;
  /// Optional per-step speed limit for j = 1..N (overrides v_max when set).
  std::vector<double> v_max_profile;
  double a_y_max = 3.5;
  double a_tot_max = 7.0;

  bool valid() const;
  double v_limit(int j) const {
    return v_max_profile.empty() ? v_max : v_max_profile[static_cast<std::size_t>(j - 1)];
  }
};

/// Another agent's broadcast poses aligned with the current horizon:
/// poses[j] is its predicted pose at time k + j, j = 0..N.
struct ConflictTrajectory {
  int agent_id = 0;
  AgentGeometry geometry;
  std::vector<Pose2D> poses;
};

/// Everything measured or received by one agent at time k.
struct ParameterVector {
  AgentState x0;
  std::vector<ConflictTrajectory> conflicts;
};

/// Per-step constraint kinds, in their order inside one step's block.
enum class ConstraintKind { SpeedMax, SpeedMin, LateralLeft, LateralRight, FrictionCircle };
inline constexpr int kStepConstraints = 5;

struct ConstraintResiduals {
  /// inequality[(j-1) * kStepConstraints + kind] = g, j = 1..N (raw, positive = violated)
  std::vector<double> inequality;
  /// equality[c * N + (j-1)] = overlap area with conflict c at step j
  std::vector<double> collision;
  double preview = 0.0;
};

/// How the preview constraint is imposed. Stop and Go are the two branches
/// of the disjunction, each penalized monotonically and scaled by
/// (s_cr_out - s_stop) so that its residual bounds the conditional one.
enum class PreviewMode {
  Conditional,  // [s_cr_out - s_N]_+ [s_N - s_stop]_+
  Stop,         // (s_cr_out - s_stop) [s_N - s_stop]_+
  Go,           // (s_cr_out - s_stop) [s_cr_out - s_N]_+
};

struct OcpSetup {
  DiscreteModel model;
  const PathSpline *path = nullptr;
  CostWeights weights;
  AgentLimits limits;
  SafetyParams safety;
  AgentGeometry geometry;
  RegionBoundaries regions;
  /// s_cr_out after the liveness rule; 0 disables the preview constraint.
  double effective_s_cr_out = 0.0;
  PreviewMode preview_mode = PreviewMode::Conditional;
  int horizon = 50;
  double v_ref = 0.0;
};

double stage_cost(const AgentState &x, double u, double v_ref, const CostWeights &w);
double terminal_cost(const AgentState &x, double v_ref, const CostWeights &w);

/// Residuals g for j = 1..N of the speed, lateral-acceleration and
/// friction-circle constraints. `traj` holds x_0..x_N.
std::vector<double> inequality_residuals(std::span<const AgentState> traj,
                                         const AgentLimits &limits, const PathSpline &path);

/// Overlap areas for every conflict and j = 1..N. Throws MissingTrajectory
/// when a conflict carries fewer than N+1 poses.
std::vector<double> ca_residuals(std::span<const AgentState> traj, const PathSpline &path,
                                 std::span<const ConflictTrajectory> conflicts,
                                 const SafetyParams &safety, const AgentGeometry &geometry);

/// Ego pose on its path at state x.
Pose2D pose_on_path(const PathSpline &path, const AgentState &x);

/// One agent's penalty-reformulated OCP at time k. Constraints are ordered as
/// 5 per step (j = 1..N), then overlap areas per conflict and step, then the
/// preview constraint.
class OcpProblem final : public PenalizedProblem {
public:
  OcpProblem(OcpSetup setup, ParameterVector params);

  std::size_t dimension() const override { return static_cast<std::size_t>(setup_.horizon); }
  std::size_t num_constraints() const override;
  double penalized_value(std::span<const double> u, std::span<const double> beta) const override;
  double penalized_value_and_gradient(std::span<const double> u, std::span<const double> beta,
                                      std::span<double> grad) const override;
  void violations(std::span<const double> u, std::span<double> out) const override;

  /// Stage and terminal costs only.
  double objective(std::span<const double> u) const;
  ConstraintResiduals residuals(std::span<const double> u) const;
  std::vector<AgentState> trajectory(std::span<const double> u) const;
  BoxSet input_box() const;

  const OcpSetup &setup() const { return setup_; }
  const ParameterVector &parameters() const { return params_; }
  std::size_t preview_index() const { return num_constraints() - 1; }

private:
  double evaluate(std::span<const double> u, std::span<const double> beta,
                  std::span<double> grad) const;
  /// Preview residual at horizon end s_N and its derivative in s_N.
  double preview_residual(double s_n, double *slope) const;

  OcpSetup setup_;
  ParameterVector params_;
};

double penalty_cost(std::span<const double> u, const OcpProblem &problem,
                    std::span<const double> beta);
std::vector<double> grad_penalty_cost(std::span<const double> u, const OcpProblem &problem,
                                      std::span<const double> beta);

}  // namespace dmpc
