#include "dmpc/kinematics.hpp"

#include <cmath>
#include <stdexcept>

namespace dmpc {
namespace {

// phi_k(x) = (e^x - sum_{m<k} x^m / m!) / x^k, evaluated without cancellation.
double phi(int k, double x) {
  if (std::abs(x) < 0.5) {
    // Taylor series: sum_{m>=0} x^m / (m+k)!
    double fact = 1.0;
    for (int m = 2; m <= k; ++m)
      fact *= m;
    double term = 1.0 / fact;
    double sum = term;
    for (int m = 1; m < 30; ++m) {
      term *= x / (m + k);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum))
        break;
    }
    return sum;
  }
  double r = std::expm1(x);  // e^x - 1
  double p = x;
  double fact = 1.0;
  for (int m = 2; m <= k; ++m) {
    fact *= m;
    p *= x;
    r -= std::pow(x, m - 1) / (fact / m);
  }
  return r / p;
}

}  // namespace

bool AgentDynamicsParams::valid() const {
  return std::isfinite(drivetrain_time_constant) && std::isfinite(sampling_time) &&
         drivetrain_time_constant > 0.0 && sampling_time > 0.0;
}

ContinuousModel continuous_matrices(const AgentDynamicsParams &params) {
  const double inv_t = 1.0 / params.drivetrain_time_constant;
  ContinuousModel m;
  m.A << -inv_t, 0.0, 0.0,
          1.0,   0.0, 0.0,
          0.0,   1.0, 0.0;
  m.B << inv_t, 0.0, 0.0;
  return m;
}

DiscreteModel discretize_exact(const ContinuousModel &model, double ts) {
  if (!(ts >= 0.0) || !std::isfinite(ts))
    throw std::invalid_argument("sampling time must be finite and >= 0");

  const Eigen::Matrix3d &A = model.A;
  const bool structured = A(0, 1) == 0.0 && A(0, 2) == 0.0 && A(1, 0) == 1.0 &&
                          A(1, 1) == 0.0 && A(1, 2) == 0.0 && A(2, 0) == 0.0 &&
                          A(2, 1) == 1.0 && A(2, 2) == 0.0 && model.B[1] == 0.0 &&
                          model.B[2] == 0.0;
  if (!structured)
    throw std::invalid_argument("discretize_exact expects the lag/integrator structure");

  const double a = A(0, 0);
  const double b = model.B[0];
  const double x = a * ts;
  const double p1 = ts * phi(1, x);            // int_0^T e^{a t} dt
  const double p2 = ts * ts * phi(2, x);       // (e^{aT} - 1 - aT) / a^2
  const double p3 = ts * ts * ts * phi(3, x);  // (e^{aT} - 1 - aT - (aT)^2/2) / a^3

  DiscreteModel d;
  d.A << std::exp(x), 0.0, 0.0,
         p1,          1.0, 0.0,
         p2,          ts,  1.0;
  d.B << b * p1, b * p2, b * p3;
  return d;
}

DiscreteModel discretize(const AgentDynamicsParams &params) {
  return discretize_exact(continuous_matrices(params), params.sampling_time);
}

void rollout_into(const DiscreteModel &model, const AgentState &x0,
                  std::span<const double> u, std::span<AgentState> out) {
  const auto &A = model.A;
  const auto &B = model.B;
  out[0] = x0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const AgentState &x = out[j];
    // A is lower triangular; expand the product to keep this loop cheap.
    out[j + 1].a_x = A(0, 0) * x.a_x + B[0] * u[j];
    out[j + 1].v = A(1, 0) * x.a_x + A(1, 1) * x.v + B[1] * u[j];
    out[j + 1].s = A(2, 0) * x.a_x + A(2, 1) * x.v + A(2, 2) * x.s + B[2] * u[j];
  }
}

std::vector<AgentState> rollout(const DiscreteModel &model, const AgentState &x0,
                                std::span<const double> u) {
  std::vector<AgentState> out(u.size() + 1);
  rollout_into(model, x0, u, out);
  return out;
}

}  // namespace dmpc
