#include "dmpc/collision.hpp"

#include <algorithm>
#include <cmath>

#include "dmpc/detail/dual.hpp"

namespace dmpc {
namespace {

using detail::abs_of;
using detail::max_of;
using detail::min_of;
using detail::plus;

template <class T>
struct Vec2 {
  T x, y;
};

template <class T>
struct Distances {
  T xf, xr, yl, yr;
};

template <class T>
struct Boxes {
  Vec2<T> lo, up;
};

template <class T>
Vec2<T> heading_vector_t(const T &psi_i, const T &psi_l) {
  using std::cos;
  using std::sin;
  const T delta = psi_l - psi_i;
  return {cos(delta), sin(delta)};
}

template <class T>
Distances<T> safety_distances_t(const T &v_i, const T &v_l, const Vec2<T> &n,
                                const SafetyParams &p) {
  return {p.d_xf + v_i * p.t_gap_x,
          p.d_xr + v_i * p.t_gap_x * plus(n.x),
          p.d_yl + v_l * p.t_gap_y * plus(T(-n.y)),
          p.d_yr + v_l * p.t_gap_y * plus(n.y)};
}

template <class T>
Boxes<T> region_t(const AgentGeometry &g, const Distances<T> &d) {
  return {{-0.5 * g.length - d.xr, -0.5 * g.width - d.yr},
          {0.5 * g.length + d.xf, 0.5 * g.width + d.yl}};
}

// Other agent's footprint, rotated into the ego frame, bounded by its
// axis-aligned hull: centre +- (|cos| L/2 + |sin| W/2, |sin| L/2 + |cos| W/2).
template <class T>
Boxes<T> bbox_t(const T &x_i, const T &y_i, const T &psi_i, const Vec2<T> &n,
                const Pose2D &other, const AgentGeometry &g) {
  using std::cos;
  using std::sin;
  const T c = cos(psi_i);
  const T s = sin(psi_i);
  const T dx = other.x - x_i;
  const T dy = other.y - y_i;
  const T cx = c * dx + s * dy;
  const T cy = c * dy - s * dx;
  const T ac = abs_of(n.x);
  const T as = abs_of(n.y);
  const T hx = ac * (0.5 * g.length) + as * (0.5 * g.width);
  const T hy = as * (0.5 * g.length) + ac * (0.5 * g.width);
  return {{cx - hx, cy - hy}, {cx + hx, cy + hy}};
}

template <class T>
struct OverlapT {
  T area, length, width;
};

template <class T>
OverlapT<T> overlap_t(const Boxes<T> &a, const Boxes<T> &b) {
  const T len = min_of(a.up.x, b.up.x) - max_of(a.lo.x, b.lo.x);
  const T wid = min_of(a.up.y, b.up.y) - max_of(a.lo.y, b.lo.y);
  return {plus(len) * plus(wid), len, wid};
}

template <class T>
OverlapT<T> ca_overlap_t(const T &x, const T &y, const T &psi, const T &v,
                         const AgentGeometry &geom_i, const SafetyParams &safety,
                         const Pose2D &other, const AgentGeometry &geom_l) {
  const Vec2<T> n = heading_vector_t(psi, T(other.psi));
  const Boxes<T> region = region_t(geom_i, safety_distances_t(v, T(other.v), n, safety));
  const Boxes<T> box = bbox_t(x, y, psi, n, other, geom_l);
  return overlap_t(region, box);
}

Boxes<double> to_boxes(const Box2D &b) {
  return {{b.lower.x(), b.lower.y()}, {b.upper.x(), b.upper.y()}};
}

Box2D to_box(const Boxes<double> &b) {
  return {{b.lo.x, b.lo.y}, {b.up.x, b.up.y}};
}

double shoelace(const std::vector<Eigen::Vector2d> &poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto &p = poly[i];
    const auto &q = poly[(i + 1) % poly.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

}  // namespace

Eigen::Vector2d heading_unit_vector(double psi_i, double psi_l) {
  const auto n = heading_vector_t(psi_i, psi_l);
  return {n.x, n.y};
}

SafetyDistances safety_distances(double v_i, double v_l, const Eigen::Vector2d &n_psi,
                                 const SafetyParams &params) {
  const auto d = safety_distances_t(v_i, v_l, Vec2<double>{n_psi.x(), n_psi.y()}, params);
  return {d.xf, d.xr, d.yl, d.yr};
}

Box2D safety_region_corners(const AgentGeometry &geom_i, const SafetyDistances &d) {
  return to_box(region_t(geom_i, Distances<double>{d.xf, d.xr, d.yl, d.yr}));
}

Box2D overapprox_bounding_box(const Pose2D &pose_l, const AgentGeometry &geom_l,
                              const Pose2D &pose_i) {
  const auto n = heading_vector_t(pose_i.psi, pose_l.psi);
  return to_box(bbox_t(pose_i.x, pose_i.y, pose_i.psi, n, pose_l, geom_l));
}

Overlap overlap_area(const Box2D &region_i, const Box2D &box_l) {
  const auto o = overlap_t(to_boxes(region_i), to_boxes(box_l));
  return {o.area, o.length, o.width};
}

double ca_overlap(const Pose2D &ego, const AgentGeometry &geom_i, const SafetyParams &safety,
                  const Pose2D &other, const AgentGeometry &geom_l) {
  return ca_overlap_t(ego.x, ego.y, ego.psi, ego.v, geom_i, safety, other, geom_l).area;
}

OverlapGradient ca_overlap_gradient(const Pose2D &ego, const AgentGeometry &geom_i,
                                    const SafetyParams &safety, const Pose2D &other,
                                    const AgentGeometry &geom_l) {
  using D = detail::Dual<4>;
  const auto o = ca_overlap_t(D::seed(ego.x, 0), D::seed(ego.y, 1), D::seed(ego.psi, 2),
                              D::seed(ego.v, 3), geom_i, safety, other, geom_l);
  return {o.area.v, o.area.d[0], o.area.d[1], o.area.d[2], o.area.d[3]};
}

double region_clearance(const Pose2D &ego, const AgentGeometry &geom_i,
                        const SafetyParams &safety, const Pose2D &other,
                        const AgentGeometry &geom_l) {
  const auto o = ca_overlap_t(ego.x, ego.y, ego.psi, ego.v, geom_i, safety, other, geom_l);
  const double gx = -o.length;
  const double gy = -o.width;
  if (gx > 0.0 || gy > 0.0)
    return std::hypot(std::max(gx, 0.0), std::max(gy, 0.0));
  return std::max(gx, gy);
}

std::array<Eigen::Vector2d, 4> footprint(const Pose2D &pose, const AgentGeometry &geom) {
  const Eigen::Vector2d c(pose.x, pose.y);
  const Eigen::Vector2d ex(std::cos(pose.psi), std::sin(pose.psi));
  const Eigen::Vector2d ey(-ex.y(), ex.x());
  const double hl = 0.5 * geom.length;
  const double hw = 0.5 * geom.width;
  return {c - hl * ex - hw * ey, c + hl * ex - hw * ey, c + hl * ex + hw * ey,
          c - hl * ex + hw * ey};
}

double convex_intersection_area(const std::vector<Eigen::Vector2d> &subject,
                                const std::vector<Eigen::Vector2d> &clip) {
  std::vector<Eigen::Vector2d> out = subject;
  for (std::size_t e = 0; e < clip.size() && !out.empty(); ++e) {
    const Eigen::Vector2d a = clip[e];
    const Eigen::Vector2d b = clip[(e + 1) % clip.size()];
    const Eigen::Vector2d edge = b - a;
    auto side = [&](const Eigen::Vector2d &p) {
      return edge.x() * (p.y() - a.y()) - edge.y() * (p.x() - a.x());
    };
    std::vector<Eigen::Vector2d> in = std::move(out);
    out.clear();
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Eigen::Vector2d &p = in[i];
      const Eigen::Vector2d &q = in[(i + 1) % in.size()];
      const double sp = side(p);
      const double sq = side(q);
      if (sp >= 0.0)
        out.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) {
        const double t = sp / (sp - sq);
        out.push_back(p + t * (q - p));
      }
    }
  }
  if (out.size() < 3)
    return 0.0;
  return std::max(0.0, shoelace(out));
}

double footprint_overlap(const Pose2D &a, const AgentGeometry &ga, const Pose2D &b,
                         const AgentGeometry &gb) {
  // Cheap reject on circumscribed circles.
  const double ra = 0.5 * std::hypot(ga.length, ga.width);
  const double rb = 0.5 * std::hypot(gb.length, gb.width);
  if (std::hypot(a.x - b.x, a.y - b.y) > ra + rb)
    return 0.0;
  const auto fa = footprint(a, ga);
  const auto fb = footprint(b, gb);
  return convex_intersection_area({fa.begin(), fa.end()}, {fb.begin(), fb.end()});
}

}  // namespace dmpc
