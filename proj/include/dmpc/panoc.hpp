#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace dmpc {

/// Per-coordinate bounds; the feasible set of the inner solver.
struct BoxSet {
  std::vector<double> lower;
  std::vector<double> upper;

  static BoxSet uniform(std::size_t n, double lo, double hi) {
    return {std::vector<double>(n, lo), std::vector<double>(n, hi)};
  }
  std::size_t size() const { return lower.size(); }
  bool valid() const;
};

void project_box(std::span<const double> u, const BoxSet &box, std::span<double> out);
std::vector<double> project_box(std::span<const double> u, const BoxSet &box);

/// Differentiable cost handed to the inner solver.
class SmoothCost {
public:
  virtual ~SmoothCost() = default;
  virtual std::size_t dimension() const = 0;
  virtual double value(std::span<const double> u) const = 0;
  /// Writes the gradient into `grad` and returns the value.
  virtual double value_and_gradient(std::span<const double> u, std::span<double> grad) const = 0;
};

struct SolverConfig {
  double tolerance = 1e-4;               // on ||u - T(u)||_inf / gamma
  double intermediate_tolerance = 1e-3;  // used by the penalty loop before the final pass
  int max_iterations = 1000;
  int lbfgs_memory = 10;
  double lipschitz_delta = 1e-6;    // probe size relative to (1 + ||u0||)
  double gamma_factor = 0.95;       // gamma = factor / L
  double shrink = 0.5;              // line-search step reduction
  double sufficient_decrease = 1e-6;
  double min_tau = 1.0 / 1048576.0;  // 2^-20
  bool record_fbe = false;

  bool valid() const;
};

enum class PanocStatus { Converged, MaxIterations };

struct PanocResult {
  std::vector<double> u;  // final T(u): always inside the box
  int iterations = 0;
  double residual = 0.0;  // ||u - T(u)||_inf / gamma at termination
  double gamma = 0.0;
  int line_search_stalls = 0;  // times the quasi-Newton step was abandoned
  PanocStatus status = PanocStatus::MaxIterations;
  /// Forward-backward envelope after each accepted iterate, grouped into runs
  /// of constant step size (a new run starts whenever gamma is reduced).
  std::vector<std::vector<double>> fbe_runs;
};

/// phi(u) + grad^T (T(u) - u) + ||T(u) - u||^2 / (2 gamma), T(u) = P(u - gamma grad).
double fbe_value(std::span<const double> u, double cost, std::span<const double> grad,
                 double gamma, const BoxSet &box);

/// Projected-gradient iterations accelerated by L-BFGS directions on the
/// fixed-point residual, globalized by a backtracking search on the
/// forward-backward envelope.
PanocResult panoc_solve(const SmoothCost &cost, const BoxSet &box,
                        std::span<const double> u_init, const SolverConfig &cfg);

std::string_view to_string(PanocStatus s);

}  // namespace dmpc
