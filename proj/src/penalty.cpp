#include "dmpc/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dmpc {
namespace {

class WeightedCost final : public SmoothCost {
public:
  WeightedCost(const PenalizedProblem &p, std::span<const double> beta) : p_(p), beta_(beta) {}
  std::size_t dimension() const override { return p_.dimension(); }
  double value(std::span<const double> u) const override { return p_.penalized_value(u, beta_); }
  double value_and_gradient(std::span<const double> u, std::span<double> grad) const override {
    return p_.penalized_value_and_gradient(u, beta_, grad);
  }

private:
  const PenalizedProblem &p_;
  std::span<const double> beta_;
};

}  // namespace

bool PenaltyConfig::valid() const {
  return tolerance > 0.0 && initial_weight > 0.0 && escalation > 1.0 &&
         max_outer_iterations >= 1;
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::Converged:
    return "converged";
  case SolveStatus::MaxOuterReached:
    return "max_outer_reached";
  case SolveStatus::MaxInnerReached:
    return "max_inner_reached";
  }
  return "unknown";
}

SolverResult penalty_outer_loop(const PenalizedProblem &problem, const BoxSet &box,
                                std::span<const double> u_warm, const PenaltyConfig &pcfg,
                                const SolverConfig &scfg, std::span<const double> initial_beta) {
  const std::size_t m = problem.num_constraints();
  if (!initial_beta.empty() && initial_beta.size() != m)
    throw std::invalid_argument("penalty_outer_loop: weight count mismatch");

  SolverResult out;
  std::vector<double> beta = initial_beta.empty()
                                 ? std::vector<double>(m, pcfg.initial_weight)
                                 : std::vector<double>(initial_beta.begin(), initial_beta.end());
  std::vector<double> u = project_box(u_warm, box);
  std::vector<double> viol(m);
  const WeightedCost cost(problem, beta);

  const double loose = std::max(scfg.intermediate_tolerance, scfg.tolerance);
  auto inner = [&](double tol) {
    SolverConfig cfg = scfg;
    cfg.tolerance = tol;
    PanocResult r = panoc_solve(cost, box, u, cfg);
    u = std::move(r.u);
    out.inner_iterations += r.iterations;
    out.line_search_stalls += r.line_search_stalls;
    out.fixed_point_residual = r.residual;
    for (auto &run : r.fbe_runs)
      out.fbe_runs.push_back(std::move(run));
    return r.status;
  };
  auto max_violation = [&] {
    problem.violations(u, viol);
    double worst = 0.0;
    for (double r : viol)
      worst = std::max(worst, r * r);
    return worst;
  };

  out.status = SolveStatus::MaxOuterReached;
  std::vector<double> best_u;
  double best_violation = std::numeric_limits<double>::infinity();
  for (int outer = 1; outer <= pcfg.max_outer_iterations; ++outer) {
    out.outer_iterations = outer;
    PanocStatus st = inner(loose);
    double worst = max_violation();
    if (worst < pcfg.tolerance && loose > scfg.tolerance) {
      st = inner(scfg.tolerance);
      worst = max_violation();
    }
    out.max_violation = worst;
    if (worst < pcfg.tolerance) {
      out.status = st == PanocStatus::Converged ? SolveStatus::Converged
                                                : SolveStatus::MaxInnerReached;
      break;
    }
    if (worst < best_violation) {
      best_violation = worst;
      best_u = u;
    }
    if (outer == pcfg.max_outer_iterations) {
      // keep the least violating iterate seen
      u = std::move(best_u);
      out.max_violation = best_violation;
      break;
    }
    for (std::size_t s = 0; s < m; ++s)
      if (viol[s] * viol[s] >= pcfg.tolerance)
        beta[s] *= pcfg.escalation;
  }
  out.u_opt = std::move(u);
  out.final_weights = std::move(beta);
  return out;
}

}  // namespace dmpc
