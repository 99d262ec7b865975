#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "dmpc/panoc.hpp"

namespace dmpc {

/// A cost with soft constraints s = 1..m. Each constraint contributes
/// beta_s * r_s(u)^2 where r_s = h_s for equalities and [g_s]_+ for
/// inequalities.
class PenalizedProblem {
public:
  virtual ~PenalizedProblem() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::size_t num_constraints() const = 0;
  virtual double penalized_value(std::span<const double> u, std::span<const double> beta) const = 0;
  virtual double penalized_value_and_gradient(std::span<const double> u,
                                              std::span<const double> beta,
                                              std::span<double> grad) const = 0;
  /// r_s(u) for every constraint, so psi_s / beta_s = r_s^2.
  virtual void violations(std::span<const double> u, std::span<double> out) const = 0;
};

struct PenaltyConfig {
  double tolerance = 1e-4;  // epsilon_s on psi_s / beta_s
  double initial_weight = 100.0;
  double escalation = 10.0;
  int max_outer_iterations = 10;

  bool valid() const;
};

enum class SolveStatus { Converged, MaxOuterReached, MaxInnerReached };

struct SolverResult {
  std::vector<double> u_opt;
  int inner_iterations = 0;
  int outer_iterations = 0;
  double fixed_point_residual = 0.0;
  double max_violation = 0.0;  // max_s psi_s / beta_s
  SolveStatus status = SolveStatus::MaxOuterReached;
  int line_search_stalls = 0;
  std::vector<double> final_weights;
  /// FBE runs of every inner solve, when SolverConfig::record_fbe is set.
  std::vector<std::vector<double>> fbe_runs;
};

std::string_view to_string(SolveStatus s);

/// Quadratic penalty method around panoc_solve. Weights start at
/// PenaltyConfig::initial_weight unless `initial_beta` is given; only the
/// weights of constraints with psi_s / beta_s >= tolerance are escalated.
/// Each inner solve is warm-started from the previous one.
SolverResult penalty_outer_loop(const PenalizedProblem &problem, const BoxSet &box,
                                std::span<const double> u_warm, const PenaltyConfig &pcfg,
                                const SolverConfig &scfg,
                                std::span<const double> initial_beta = {});

}  // namespace dmpc
