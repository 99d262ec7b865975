#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dmpc {

struct Waypoint {
  double x = 0.0;  // x_g [m]
  double y = 0.0;  // y_g [m]
};

/// Pose and differential geometry of a path at one path coordinate.
struct PathPoint {
  Eigen::Vector2d position;  // F_p(s)
  Eigen::Vector2d tangent;   // dF_p/ds
  double heading = 0.0;      // psi(s), continuous branch
  double heading_rate = 0.0; // dpsi/ds
  double curvature = 0.0;    // kappa(s), positive for left turns
  double curvature_rate = 0.0;
};

/// Cubic interpolating B-spline s -> (x_g, y_g).
///
/// Parameter values are the cumulative chord lengths of the waypoints, so s
/// approximates arc length. End conditions are not-a-knot (the first two
/// and the last two pieces share one cubic each). Outside [0, s_max] the
/// curve continues along the end tangent with unit speed, so heading is
/// constant and curvature is zero there.
///
/// Immutable after construction.
class PathSpline {
public:
  static constexpr int kDegree = 3;

  /// Throws TooFewWaypoints (< 4 points) or DegenerateWaypoints (repeated
  /// consecutive points).
  static PathSpline fit(std::span<const Waypoint> waypoints);

  double s_max() const { return params_.back(); }
  const std::vector<double> &knots() const { return knots_; }
  const std::vector<double> &coeffs_x() const { return alpha_x_; }
  const std::vector<double> &coeffs_y() const { return alpha_y_; }
  /// Interpolation parameter of each waypoint.
  const std::vector<double> &params() const { return params_; }

  Eigen::Vector2d position(double s) const;
  /// Throws SingularTangent when |dF_p/ds| < 1e-9.
  double heading(double s) const;
  double curvature(double s) const;
  PathPoint point(double s) const;

  /// Derivatives 0..3 of F_p via de Boor's recursion on the B-spline basis.
  /// Only valid inside [0, s_max]; used to build the evaluation cache and by
  /// tests as the reference evaluator.
  std::array<Eigen::Vector2d, 4> deboor_derivatives(double s) const;

private:
  struct Piece {
    // F_p(s0 + t) = c0 + c1 t + c2 t^2 + c3 t^3
    Eigen::Vector2d c0, c1, c2, c3;
    double heading_ref;  // unwrapped heading at the piece start
  };

  std::size_t piece_index(double s) const;
  std::array<Eigen::Vector2d, 4> local_derivatives(double s, std::size_t &piece) const;

  std::vector<double> params_;
  std::vector<double> knots_;
  std::vector<double> alpha_x_, alpha_y_;
  std::vector<Piece> pieces_;
  Eigen::Vector2d start_pos_, start_dir_, end_pos_, end_dir_;
  double start_heading_ = 0.0, end_heading_ = 0.0;
};

inline PathSpline fit_path_spline(std::span<const Waypoint> waypoints) {
  return PathSpline::fit(waypoints);
}
inline Eigen::Vector2d eval_position(const PathSpline &p, double s) { return p.position(s); }
inline double eval_heading(const PathSpline &p, double s) { return p.heading(s); }
inline double eval_curvature(const PathSpline &p, double s) { return p.curvature(s); }

/// Closest path coordinate to `q`, searched over [s_lo, s_hi] (coarse scan
/// followed by Newton refinement). Returns the path coordinate.
double project_onto_path(const PathSpline &path, const Eigen::Vector2d &q, double s_lo,
                         double s_hi);

}  // namespace dmpc
