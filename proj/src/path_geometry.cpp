#include "dmpc/path_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dmpc/errors.hpp"

namespace dmpc {
namespace {

constexpr int kP = PathSpline::kDegree;
constexpr double kMinTangent = 1e-9;

std::size_t find_span(const std::vector<double> &U, std::size_t n_ctrl, double u) {
  if (u >= U[n_ctrl])
    return n_ctrl - 1;
  if (u <= U[kP])
    return kP;
  auto it = std::upper_bound(U.begin() + kP, U.begin() + n_ctrl + 1, u);
  return static_cast<std::size_t>(it - U.begin()) - 1;
}

// Basis functions and their derivatives up to order 3 on knot span `i`
// (Piegl & Tiller, algorithm A2.3). ders[k][j] = d^k N_{i-p+j} / du^k.
void basis_derivatives(std::size_t i, double u, const std::vector<double> &U,
                       double ders[4][4]) {
  constexpr int n = 3;
  double ndu[kP + 1][kP + 1];
  double left[kP + 1], right[kP + 1];
  double a[2][kP + 1];

  ndu[0][0] = 1.0;
  for (int j = 1; j <= kP; ++j) {
    left[j] = u - U[i + 1 - j];
    right[j] = U[i + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  for (int j = 0; j <= kP; ++j)
    ders[0][j] = ndu[j][kP];

  for (int r = 0; r <= kP; ++r) {
    int s1 = 0, s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= n; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = kP - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : kP - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      ders[k][r] = d;
      std::swap(s1, s2);
    }
  }
  double fac = kP;
  for (int k = 1; k <= n; ++k) {
    for (int j = 0; j <= kP; ++j)
      ders[k][j] *= fac;
    fac *= (kP - k);
  }
}

double wrap_near(double angle, double ref) {
  return ref + std::remainder(angle - ref, 2.0 * std::numbers::pi);
}

}  // namespace

PathSpline PathSpline::fit(std::span<const Waypoint> wp) {
  if (wp.size() < 4)
    throw TooFewWaypoints("path needs at least 4 waypoints, got " + std::to_string(wp.size()));
  for (const auto &w : wp)
    if (!std::isfinite(w.x) || !std::isfinite(w.y))
      throw DegenerateWaypoints("waypoint coordinates must be finite");

  PathSpline sp;
  const std::size_t m = wp.size() - 1;
  sp.params_.resize(m + 1);
  sp.params_[0] = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    const double d = std::hypot(wp[i].x - wp[i - 1].x, wp[i].y - wp[i - 1].y);
    if (!(d > 0.0))
      throw DegenerateWaypoints("consecutive waypoints " + std::to_string(i - 1) + " and " +
                                std::to_string(i) + " coincide");
    sp.params_[i] = sp.params_[i - 1] + d;
  }

  // Clamped knot vector with every interior waypoint parameter as a knot.
  const std::size_t n_ctrl = m + 3;
  sp.knots_.reserve(n_ctrl + kP + 1);
  for (int r = 0; r < kP; ++r)
    sp.knots_.push_back(sp.params_.front());
  for (double t : sp.params_)
    sp.knots_.push_back(t);
  for (int r = 0; r < kP; ++r)
    sp.knots_.push_back(sp.params_.back());

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n_ctrl, n_ctrl);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n_ctrl, 2);
  double ders[4][4];
  for (std::size_t i = 0; i <= m; ++i) {
    const std::size_t span = find_span(sp.knots_, n_ctrl, sp.params_[i]);
    basis_derivatives(span, sp.params_[i], sp.knots_, ders);
    for (int r = 0; r <= kP; ++r)
      M(i, span - kP + r) = ders[0][r];
    rhs(i, 0) = wp[i].x;
    rhs(i, 1) = wp[i].y;
  }
  // Not-a-knot end conditions: F''' continuous across the first and last
  // interior knots.
  for (std::size_t e = 0; e < 2; ++e) {
    const std::size_t left = e == 0 ? kP : kP + m - 2;
    const double t = sp.params_[e == 0 ? 1 : m - 1];
    for (std::size_t side = 0; side < 2; ++side) {
      const std::size_t span = left + side;
      basis_derivatives(span, t, sp.knots_, ders);
      for (int r = 0; r <= kP; ++r)
        M(m + 1 + e, span - kP + r) += (side == 0 ? 1.0 : -1.0) * ders[3][r];
    }
  }
  const Eigen::MatrixXd alpha = M.partialPivLu().solve(rhs);
  sp.alpha_x_.assign(alpha.col(0).data(), alpha.col(0).data() + n_ctrl);
  sp.alpha_y_.assign(alpha.col(1).data(), alpha.col(1).data() + n_ctrl);

  sp.pieces_.resize(m);
  double prev_heading = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto d = sp.deboor_derivatives(sp.params_[i]);
    Piece &pc = sp.pieces_[i];
    pc.c0 = d[0];
    pc.c1 = d[1];
    pc.c2 = d[2] / 2.0;
    pc.c3 = d[3] / 6.0;
    if (d[1].norm() < kMinTangent)
      throw DegenerateWaypoints("spline tangent vanishes at waypoint " + std::to_string(i));
    const double raw = std::atan2(d[1].y(), d[1].x());
    pc.heading_ref = i == 0 ? raw : wrap_near(raw, prev_heading);
    prev_heading = pc.heading_ref;
  }

  const auto d_end = sp.deboor_derivatives(sp.s_max());
  sp.start_pos_ = sp.pieces_.front().c0;
  sp.start_dir_ = sp.pieces_.front().c1.normalized();
  sp.end_pos_ = d_end[0];
  sp.end_dir_ = d_end[1].normalized();
  sp.start_heading_ = sp.pieces_.front().heading_ref;
  sp.end_heading_ = wrap_near(std::atan2(d_end[1].y(), d_end[1].x()), prev_heading);
  return sp;
}

std::array<Eigen::Vector2d, 4> PathSpline::deboor_derivatives(double s) const {
  const std::size_t n_ctrl = alpha_x_.size();
  const std::size_t span = find_span(knots_, n_ctrl, s);
  double ders[4][4];
  basis_derivatives(span, s, knots_, ders);
  std::array<Eigen::Vector2d, 4> out;
  for (int k = 0; k <= 3; ++k) {
    double x = 0.0, y = 0.0;
    for (int r = 0; r <= kP; ++r) {
      x += ders[k][r] * alpha_x_[span - kP + r];
      y += ders[k][r] * alpha_y_[span - kP + r];
    }
    out[k] = {x, y};
  }
  return out;
}

std::size_t PathSpline::piece_index(double s) const {
  auto it = std::upper_bound(params_.begin(), params_.end(), s);
  std::size_t idx = it == params_.begin() ? 0 : static_cast<std::size_t>(it - params_.begin()) - 1;
  return std::min(idx, pieces_.size() - 1);
}

std::array<Eigen::Vector2d, 4> PathSpline::local_derivatives(double s, std::size_t &piece) const {
  piece = piece_index(s);
  const Piece &pc = pieces_[piece];
  const double t = s - params_[piece];
  return {pc.c0 + t * (pc.c1 + t * (pc.c2 + t * pc.c3)),
          pc.c1 + t * (2.0 * pc.c2 + t * 3.0 * pc.c3),
          2.0 * pc.c2 + t * 6.0 * pc.c3,
          6.0 * pc.c3};
}

Eigen::Vector2d PathSpline::position(double s) const {
  if (s < 0.0)
    return start_pos_ + s * start_dir_;
  if (s > s_max())
    return end_pos_ + (s - s_max()) * end_dir_;
  std::size_t piece;
  return local_derivatives(s, piece)[0];
}

double PathSpline::heading(double s) const { return point(s).heading; }

double PathSpline::curvature(double s) const { return point(s).curvature; }

PathPoint PathSpline::point(double s) const {
  PathPoint p;
  if (s < 0.0 || s > s_max()) {
    const bool before = s < 0.0;
    p.position = before ? Eigen::Vector2d(start_pos_ + s * start_dir_)
                        : Eigen::Vector2d(end_pos_ + (s - s_max()) * end_dir_);
    p.tangent = before ? start_dir_ : end_dir_;
    p.heading = before ? start_heading_ : end_heading_;
    return p;
  }
  std::size_t piece;
  const auto d = local_derivatives(s, piece);
  const double speed2 = d[1].squaredNorm();
  const double speed = std::sqrt(speed2);
  if (speed < kMinTangent)
    throw SingularTangent("path tangent vanishes at s = " + std::to_string(s));
  const double cross12 = d[1].x() * d[2].y() - d[1].y() * d[2].x();
  const double cross13 = d[1].x() * d[3].y() - d[1].y() * d[3].x();
  const double dot12 = d[1].dot(d[2]);
  const double speed3 = speed2 * speed;

  p.position = d[0];
  p.tangent = d[1];
  p.heading = wrap_near(std::atan2(d[1].y(), d[1].x()), pieces_[piece].heading_ref);
  p.heading_rate = cross12 / speed2;
  p.curvature = cross12 / speed3;
  p.curvature_rate = cross13 / speed3 - 3.0 * cross12 * dot12 / (speed3 * speed2);
  return p;
}

double project_onto_path(const PathSpline &path, const Eigen::Vector2d &q, double s_lo,
                         double s_hi) {
  if (s_hi < s_lo)
    std::swap(s_lo, s_hi);
  constexpr double kStep = 0.5;
  double best_s = s_lo;
  double best_d = (path.position(s_lo) - q).squaredNorm();
  for (double s = s_lo + kStep; s <= s_hi; s += kStep) {
    const double d = (path.position(s) - q).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best_s = s;
    }
  }
  // Newton on g(s) = (F(s) - q) . F'(s).
  double s = best_s;
  for (int it = 0; it < 8; ++it) {
    const PathPoint pt = path.point(s);
    const Eigen::Vector2d diff = pt.position - q;
    const double g = diff.dot(pt.tangent);
    const double curv_term = pt.curvature * pt.tangent.squaredNorm();
    // F'' is (curvature * |F'|^2) along the normal; normal = rot90(tangent)/|F'|.
    const Eigen::Vector2d normal = Eigen::Vector2d(-pt.tangent.y(), pt.tangent.x()).normalized();
    const double dg = pt.tangent.squaredNorm() + diff.dot(normal) * curv_term;
    if (!(dg > 1e-12))
      break;
    const double next = std::clamp(s - g / dg, s_lo, s_hi);
    if (std::abs(next - s) < 1e-10) {
      s = next;
      break;
    }
    s = next;
  }
  return s;
}

}  // namespace dmpc
