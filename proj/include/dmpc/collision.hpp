#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace dmpc {

struct AgentGeometry {
  double length = 5.0;  // L [m]
  double width = 2.0;   // W [m]
};

/// Basic (motion-independent) margins and time gaps of the safety region.
struct SafetyParams {
  double d_xf = 2.0;  // front [m]
  double d_xr = 2.0;  // rear [m]
  double d_yl = 1.0;  // left [m]
  double d_yr = 1.0;  // right [m]
  double t_gap_x = 1.0;  // [s]
  double t_gap_y = 1.0;  // [s]
};

/// One time slice of a broadcast trajectory.
struct Pose2D {
  double x = 0.0;    // [m]
  double y = 0.0;    // [m]
  double psi = 0.0;  // [rad]
  double v = 0.0;    // [m/s]
};

/// Axis-aligned box in the ego body frame.
struct Box2D {
  Eigen::Vector2d lower{0.0, 0.0};
  Eigen::Vector2d upper{0.0, 0.0};
};

struct SafetyDistances {
  double xf = 0.0, xr = 0.0, yl = 0.0, yr = 0.0;
};

struct Overlap {
  double area = 0.0;    // max{0, length} * max{0, width}
  double length = 0.0;  // extent of the intersection along x (negative if separated)
  double width = 0.0;   // same along y
};

/// Heading of agent l expressed in agent i's body frame.
Eigen::Vector2d heading_unit_vector(double psi_i, double psi_l);

/// Longitudinal margins grow with the ego speed (rear only for traffic moving
/// the same way); lateral margins grow with the other agent's speed on the
/// side it approaches from.
SafetyDistances safety_distances(double v_i, double v_l, const Eigen::Vector2d &n_psi,
                                 const SafetyParams &params);

Box2D safety_region_corners(const AgentGeometry &geom_i, const SafetyDistances &d);

/// Axis-aligned over-approximation of agent l's footprint in agent i's body frame.
Box2D overapprox_bounding_box(const Pose2D &pose_l, const AgentGeometry &geom_l,
                              const Pose2D &pose_i);

Overlap overlap_area(const Box2D &region_i, const Box2D &box_l);

/// Overlap between agent i's safety region and agent l's bounding box along
/// with its partial derivatives with respect to the ego pose. Derivatives at
/// min/max kinks take the one-sided value of the first branch (zero at
/// max{0, .}).
struct OverlapGradient {
  double area = 0.0;
  double d_x = 0.0, d_y = 0.0, d_psi = 0.0, d_v = 0.0;
};

double ca_overlap(const Pose2D &ego, const AgentGeometry &geom_i, const SafetyParams &safety,
                  const Pose2D &other, const AgentGeometry &geom_l);
OverlapGradient ca_overlap_gradient(const Pose2D &ego, const AgentGeometry &geom_i,
                                    const SafetyParams &safety, const Pose2D &other,
                                    const AgentGeometry &geom_l);

/// Signed clearance between the ego safety region and the other agent's
/// box: Euclidean gap when separated, minus the penetration depth when
/// overlapping.
double region_clearance(const Pose2D &ego, const AgentGeometry &geom_i,
                        const SafetyParams &safety, const Pose2D &other,
                        const AgentGeometry &geom_l);

/// Corners of the physical footprint in the global frame, counter-clockwise.
std::array<Eigen::Vector2d, 4> footprint(const Pose2D &pose, const AgentGeometry &geom);

/// Area of the intersection of two convex counter-clockwise polygons
/// (Sutherland-Hodgman clipping).
double convex_intersection_area(const std::vector<Eigen::Vector2d> &subject,
                                const std::vector<Eigen::Vector2d> &clip);

/// Exact intersection area of two rotated footprints.
double footprint_overlap(const Pose2D &a, const AgentGeometry &ga, const Pose2D &b,
                         const AgentGeometry &gb);

}  // namespace dmpc
