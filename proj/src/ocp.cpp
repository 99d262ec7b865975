#include "dmpc/ocp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dmpc/errors.hpp"

namespace dmpc {

bool AgentLimits::valid() const {
  if (!(a_x_min < 0.0 && 0.0 < a_x_max && v_max > 0.0 && a_y_max > 0.0 && a_tot_max > 0.0))
    return false;
  return std::all_of(v_max_profile.begin(), v_max_profile.end(),
                     [](double v) { return v > 0.0; });
}

double stage_cost(const AgentState &x, double u, double v_ref, const CostWeights &w) {
  const double dv = x.v - v_ref;
  return w.q * dv * dv + w.r * u * u;
}

double terminal_cost(const AgentState &x, double v_ref, const CostWeights &w) {
  const double dv = x.v - v_ref;
  return w.q_n * dv * dv;
}

Pose2D pose_on_path(const PathSpline &path, const AgentState &x) {
  const PathPoint p = path.point(x.s);
  return {p.position.x(), p.position.y(), p.heading, x.v};
}

namespace {

struct StepResiduals {
  double g[kStepConstraints];
  Eigen::Vector3d dg[kStepConstraints];  // w.r.t. (a_x, v, s)
};

StepResiduals step_residuals(const AgentState &x, const PathPoint &p, double v_max,
                             const AgentLimits &lim) {
  const double ay = p.curvature * x.v * x.v;
  const Eigen::Vector3d day(0.0, 2.0 * p.curvature * x.v, p.curvature_rate * x.v * x.v);
  StepResiduals r;
  r.g[0] = x.v - v_max;
  r.dg[0] = {0.0, 1.0, 0.0};
  r.g[1] = -x.v;
  r.dg[1] = {0.0, -1.0, 0.0};
  r.g[2] = ay - lim.a_y_max;
  r.dg[2] = day;
  r.g[3] = -ay - lim.a_y_max;
  r.dg[3] = -day;
  r.g[4] = x.a_x * x.a_x + ay * ay - lim.a_tot_max * lim.a_tot_max;
  r.dg[4] = 2.0 * ay * day;
  r.dg[4][0] += 2.0 * x.a_x;
  return r;
}

void check_conflicts(std::span<const ConflictTrajectory> conflicts, std::size_t horizon) {
  for (const auto &c : conflicts)
    if (c.poses.size() < horizon + 1)
      throw MissingTrajectory("no trajectory of length " + std::to_string(horizon + 1) +
                              " for agent " + std::to_string(c.agent_id));
}

}  // namespace

std::vector<double> inequality_residuals(std::span<const AgentState> traj,
                                         const AgentLimits &limits, const PathSpline &path) {
  const int n = static_cast<int>(traj.size()) - 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n * kStepConstraints));
  for (int j = 1; j <= n; ++j) {
    const auto r = step_residuals(traj[j], path.point(traj[j].s), limits.v_limit(j), limits);
    out.insert(out.end(), std::begin(r.g), std::end(r.g));
  }
  return out;
}

std::vector<double> ca_residuals(std::span<const AgentState> traj, const PathSpline &path,
                                 std::span<const ConflictTrajectory> conflicts,
                                 const SafetyParams &safety, const AgentGeometry &geometry) {
  const std::size_t n = traj.size() - 1;
  check_conflicts(conflicts, n);
  std::vector<double> out;
  out.reserve(conflicts.size() * n);
  for (const auto &c : conflicts)
    for (std::size_t j = 1; j <= n; ++j)
      out.push_back(
          ca_overlap(pose_on_path(path, traj[j]), geometry, safety, c.poses[j], c.geometry));
  return out;
}

OcpProblem::OcpProblem(OcpSetup setup, ParameterVector params)
    : setup_(std::move(setup)), params_(std::move(params)) {
  if (setup_.horizon < 1)
    throw std::invalid_argument("OcpProblem: horizon must be positive");
  if (!setup_.path)
    throw std::invalid_argument("OcpProblem: missing path");
  if (!setup_.limits.v_max_profile.empty() &&
      setup_.limits.v_max_profile.size() != static_cast<std::size_t>(setup_.horizon))
    throw std::invalid_argument("OcpProblem: speed-limit profile length differs from horizon");
  check_conflicts(params_.conflicts, static_cast<std::size_t>(setup_.horizon));
}

std::size_t OcpProblem::num_constraints() const {
  const std::size_t n = static_cast<std::size_t>(setup_.horizon);
  return n * kStepConstraints + params_.conflicts.size() * n + 1;
}

BoxSet OcpProblem::input_box() const {
  return BoxSet::uniform(dimension(), setup_.limits.a_x_min, setup_.limits.a_x_max);
}

std::vector<AgentState> OcpProblem::trajectory(std::span<const double> u) const {
  return rollout(setup_.model, params_.x0, u);
}

double OcpProblem::objective(std::span<const double> u) const {
  const auto traj = trajectory(u);
  double f = 0.0;
  for (int j = 0; j < setup_.horizon; ++j)
    f += stage_cost(traj[j], u[j], setup_.v_ref, setup_.weights);
  return f + terminal_cost(traj.back(), setup_.v_ref, setup_.weights);
}

ConstraintResiduals OcpProblem::residuals(std::span<const double> u) const {
  const auto traj = trajectory(u);
  ConstraintResiduals r;
  r.inequality = inequality_residuals(traj, setup_.limits, *setup_.path);
  r.collision = ca_residuals(traj, *setup_.path, params_.conflicts, setup_.safety,
                             setup_.geometry);
  r.preview = preview_residual(traj.back().s, nullptr);
  return r;
}

double OcpProblem::preview_residual(double s_n, double *slope) const {
  const double ahead = setup_.effective_s_cr_out - s_n;
  const double past = s_n - setup_.regions.s_stop;
  const double gap = setup_.effective_s_cr_out - setup_.regions.s_stop;
  double h = 0.0, dh = 0.0;
  if (setup_.effective_s_cr_out > 0.0) {
    switch (setup_.preview_mode) {
    case PreviewMode::Conditional:
      if (ahead > 0.0 && past > 0.0) {
        h = ahead * past;
        dh = ahead - past;
      }
      break;
    case PreviewMode::Stop:
      if (past > 0.0) {
        h = gap * past;
        dh = gap;
      }
      break;
    case PreviewMode::Go:
      if (ahead > 0.0) {
        h = gap * ahead;
        dh = -gap;
      }
      break;
    }
  }
  if (slope)
    *slope = dh;
  return h;
}

void OcpProblem::violations(std::span<const double> u, std::span<double> out) const {
  const auto r = residuals(u);
  std::size_t k = 0;
  for (double g : r.inequality)
    out[k++] = std::max(0.0, g);
  for (double h : r.collision)
    out[k++] = h;
  out[k] = r.preview;
}

double OcpProblem::penalized_value(std::span<const double> u,
                                   std::span<const double> beta) const {
  return evaluate(u, beta, {});
}

double OcpProblem::penalized_value_and_gradient(std::span<const double> u,
                                                std::span<const double> beta,
                                                std::span<double> grad) const {
  return evaluate(u, beta, grad);
}

double OcpProblem::evaluate(std::span<const double> u, std::span<const double> beta,
                            std::span<double> grad) const {
  const int n = setup_.horizon;
  const bool want_grad = !grad.empty();
  const CostWeights &w = setup_.weights;
  std::vector<AgentState> traj(static_cast<std::size_t>(n) + 1);
  rollout_into(setup_.model, params_.x0, u, traj);

  // df/dx_j for j = 1..N, as (a_x, v, s)
  std::vector<Eigen::Vector3d> dfdx(want_grad ? traj.size() : 0, Eigen::Vector3d::Zero());

  double f = 0.0;
  for (int j = 0; j < n; ++j) {
    f += stage_cost(traj[j], u[j], setup_.v_ref, w);
    if (want_grad && j > 0)
      dfdx[j][1] += 2.0 * w.q * (traj[j].v - setup_.v_ref);
  }
  f += terminal_cost(traj[n], setup_.v_ref, w);
  if (want_grad)
    dfdx[n][1] += 2.0 * w.q_n * (traj[n].v - setup_.v_ref);

  const std::size_t ca_base = static_cast<std::size_t>(n) * kStepConstraints;
  for (int j = 1; j <= n; ++j) {
    const AgentState &x = traj[j];
    const PathPoint p = setup_.path->point(x.s);
    const auto r = step_residuals(x, p, setup_.limits.v_limit(j), setup_.limits);
    const std::size_t base = static_cast<std::size_t>(j - 1) * kStepConstraints;
    for (int c = 0; c < kStepConstraints; ++c) {
      if (r.g[c] <= 0.0)
        continue;
      const double b = beta[base + c];
      f += b * r.g[c] * r.g[c];
      if (want_grad)
        dfdx[j] += 2.0 * b * r.g[c] * r.dg[c];
    }

    const Pose2D ego{p.position.x(), p.position.y(), p.heading, x.v};
    for (std::size_t c = 0; c < params_.conflicts.size(); ++c) {
      const ConflictTrajectory &other = params_.conflicts[c];
      const double b = beta[ca_base + c * n + (j - 1)];
      if (!want_grad) {
        const double a =
            ca_overlap(ego, setup_.geometry, setup_.safety, other.poses[j], other.geometry);
        f += b * a * a;
        continue;
      }
      const OverlapGradient og =
          ca_overlap_gradient(ego, setup_.geometry, setup_.safety, other.poses[j], other.geometry);
      if (og.area == 0.0)
        continue;
      f += b * og.area * og.area;
      const double k = 2.0 * b * og.area;
      dfdx[j][1] += k * og.d_v;
      dfdx[j][2] += k * (og.d_x * p.tangent.x() + og.d_y * p.tangent.y() +
                         og.d_psi * p.heading_rate);
    }
  }

  // Preview constraint at the horizon end.
  {
    double slope = 0.0;
    const double h = preview_residual(traj[n].s, &slope);
    if (h != 0.0) {
      const double b = beta[num_constraints() - 1];
      f += b * h * h;
      if (want_grad)
        dfdx[n][2] += 2.0 * b * h * slope;
    }
  }

  if (want_grad) {
    const Eigen::Matrix3d At = setup_.model.A.transpose();
    const Eigen::Vector3d &B = setup_.model.B;
    Eigen::Vector3d lambda = dfdx[n];
    grad[n - 1] = 2.0 * w.r * u[n - 1] + B.dot(lambda);
    for (int j = n - 1; j >= 1; --j) {
      lambda = dfdx[j] + At * lambda;
      grad[j - 1] = 2.0 * w.r * u[j - 1] + B.dot(lambda);
    }
  }
  return f;
}

double penalty_cost(std::span<const double> u, const OcpProblem &problem,
                    std::span<const double> beta) {
  return problem.penalized_value(u, beta);
}

std::vector<double> grad_penalty_cost(std::span<const double> u, const OcpProblem &problem,
                                      std::span<const double> beta) {
  std::vector<double> g(problem.dimension());
  problem.penalized_value_and_gradient(u, beta, g);
  return g;
}

}  // namespace dmpc
