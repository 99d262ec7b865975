#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dmpc/collision.hpp"
#include "support.hpp"

using namespace dmpc;
using std::numbers::pi;

namespace {

Box2D box(double x0, double x1, double y0, double y1) { return {{x0, y0}, {x1, y1}}; }

bool inside(const Box2D &b, double x, double y) {
  return x >= b.lower.x() && x <= b.upper.x() && y >= b.lower.y() && y <= b.upper.y();
}

// Cell-centre count of points inside both boxes over a window of n x n cells.
double raster_area(const Box2D &a, const Box2D &b, double x0, double x1, double y0, double y1,
                   int n) {
  const double hx = (x1 - x0) / n, hy = (y1 - y0) / n;
  long count = 0;
  for (int i = 0; i < n; ++i) {
    const double x = x0 + (i + 0.5) * hx;
    for (int j = 0; j < n; ++j) {
      const double y = y0 + (j + 0.5) * hy;
      count += inside(a, x, y) && inside(b, x, y);
    }
  }
  return count * hx * hy;
}

Box2D random_box(test::Gen &g) {
  const double cx = g.uniform(-5, 5), cy = g.uniform(-5, 5);
  const double w = g.uniform(0.2, 10), h = g.uniform(0.2, 10);
  return box(cx - w / 2, cx + w / 2, cy - h / 2, cy + h / 2);
}

// Even-odd test for a convex counter-clockwise polygon.
bool in_polygon(const std::array<Eigen::Vector2d, 4> &p, const Eigen::Vector2d &q) {
  for (int e = 0; e < 4; ++e) {
    const Eigen::Vector2d a = p[e], b = p[(e + 1) % 4];
    if ((b.x() - a.x()) * (q.y() - a.y()) - (b.y() - a.y()) * (q.x() - a.x()) < 0)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("heading unit vector") {
  const auto same = heading_unit_vector(0.7, 0.7);
  CHECK(same.x() == doctest::Approx(1.0));
  CHECK(std::abs(same.y()) < 1e-15);
  const auto perp = heading_unit_vector(0.0, pi / 2);
  CHECK(std::abs(perp.x()) < 1e-15);
  CHECK(perp.y() == doctest::Approx(1.0));
  const auto quarter = heading_unit_vector(pi / 4, 0.0);
  CHECK(quarter.x() == doctest::Approx(std::sqrt(0.5)));
  CHECK(quarter.y() == doctest::Approx(-std::sqrt(0.5)));

  test::Gen g(31);
  for (int i = 0; i < 1000; ++i)
    CHECK(std::abs(heading_unit_vector(g.uniform(-10, 10), g.uniform(-10, 10)).norm() - 1.0) <=
          1e-12);
}

TEST_CASE("safety distances") {
  const SafetyParams p;  // (2, 2, 1, 1), gaps 1 s
  auto d = safety_distances(14, 0, {1, 0}, p);
  CHECK(d.xf == 16);
  CHECK(d.xr == 16);
  CHECK(d.yl == 1);
  CHECK(d.yr == 1);

  d = safety_distances(14, 8, {0, 1}, p);
  CHECK(d.xf == 16);
  CHECK(d.xr == 2);
  CHECK(d.yr == 9);
  CHECK(d.yl == 1);

  d = safety_distances(14, 8, {0, -1}, p);
  CHECK(d.yl == 9);
  CHECK(d.yr == 1);

  CHECK(safety_distances(14, 8, {-1, 0}, p).xr == 2);
}

TEST_CASE("safety region corners") {
  const AgentGeometry g;
  auto b = safety_region_corners(g, {16, 16, 1, 1});
  CHECK(b.lower == Eigen::Vector2d(-18.5, -2));
  CHECK(b.upper == Eigen::Vector2d(18.5, 2));
  b = safety_region_corners(g, {});
  CHECK(b.lower == Eigen::Vector2d(-2.5, -1));
  CHECK(b.upper == Eigen::Vector2d(2.5, 1));
  b = safety_region_corners(g, {.xf = 3, .xr = 0, .yl = 2, .yr = 0});
  CHECK(b.lower == Eigen::Vector2d(-2.5, -1));
  CHECK(b.upper == Eigen::Vector2d(5.5, 3));
}

TEST_CASE("over-approximating bounding box") {
  const AgentGeometry g;
  auto b = overapprox_bounding_box({10, 0, 0, 0}, g, {0, 0, 0, 0});
  CHECK(b.lower.x() == doctest::Approx(7.5));
  CHECK(b.upper.x() == doctest::Approx(12.5));
  CHECK(b.lower.y() == doctest::Approx(-1));
  CHECK(b.upper.y() == doctest::Approx(1));

  b = overapprox_bounding_box({3, 4, pi / 2, 0}, g, {3, 4, 0, 0});
  CHECK(b.lower.x() == doctest::Approx(-1));
  CHECK(b.upper.x() == doctest::Approx(1));
  CHECK(b.lower.y() == doctest::Approx(-2.5));
  CHECK(b.upper.y() == doctest::Approx(2.5));

  b = overapprox_bounding_box({0, 0, pi / 4 + 0.3, 0}, g, {0, 0, 0.3, 0});
  const double half = 7.0 * std::sqrt(2.0) / 4.0;
  CHECK(b.upper.x() == doctest::Approx(half));
  CHECK(b.upper.y() == doctest::Approx(half));
  CHECK(half == doctest::Approx(2.4749).epsilon(1e-4));
}

TEST_CASE("over-approximation contains the rotated footprint") {
  test::Gen g(32);
  for (int i = 0; i < 500; ++i) {
    const Pose2D ego{g.uniform(-20, 20), g.uniform(-20, 20), g.uniform(-pi, pi), 0};
    const Pose2D other{g.uniform(-20, 20), g.uniform(-20, 20), g.uniform(-pi, pi), 0};
    const AgentGeometry geom{g.uniform(1, 8), g.uniform(1, 3)};
    const Box2D b = overapprox_bounding_box(other, geom, ego);
    const double c = std::cos(ego.psi), s = std::sin(ego.psi);
    for (const auto &corner : footprint(other, geom)) {
      const double dx = corner.x() - ego.x, dy = corner.y() - ego.y;
      const double bx = c * dx + s * dy, by = -s * dx + c * dy;
      CHECK(bx >= b.lower.x() - 1e-9);
      CHECK(bx <= b.upper.x() + 1e-9);
      CHECK(by >= b.lower.y() - 1e-9);
      CHECK(by <= b.upper.y() + 1e-9);
    }
  }
}

TEST_CASE("overlap area examples") {
  auto o = overlap_area(box(0, 1, 0, 1), box(5, 6, 5, 6));
  CHECK(o.area == 0.0);
  CHECK(o.length == -4.0);
  CHECK(overlap_area(box(0, 1, 0, 1), box(0, 1, 0, 1)).area == 1.0);
  o = overlap_area(box(-4.5, 5.5, -2, 2), box(4, 8, 1, 3));
  CHECK(o.length == doctest::Approx(1.5));
  CHECK(o.width == doctest::Approx(1.0));
  CHECK(o.area == doctest::Approx(1.5));
  // touching boxes do not collide
  CHECK(overlap_area(box(0, 1, 0, 1), box(1, 2, 0, 1)).area == 0.0);
}

TEST_CASE("overlap area against rasterization oracle") {
  const Box2D a = box(-4.5, 5.5, -2, 2), b = box(4, 8, 1, 3);
  CHECK(std::abs(raster_area(a, b, -5, 9, -3, 4, 7000) - 1.5) <= 1e-2);

  test::Gen g(33);
  int positive = 0;
  for (int i = 0; i < 1000; ++i) {
    const Box2D p = random_box(g), q = random_box(g);
    const double area = overlap_area(p, q).area;
    // window around both boxes' common x/y extent, padded
    const double x0 = std::max(p.lower.x(), q.lower.x()) - 0.02;
    const double x1 = std::min(p.upper.x(), q.upper.x()) + 0.02;
    const double y0 = std::max(p.lower.y(), q.lower.y()) - 0.02;
    const double y1 = std::min(p.upper.y(), q.upper.y()) + 0.02;
    double ref = 0.0;
    if (x1 > x0 && y1 > y0)
      ref = raster_area(p, q, x0, x1, y0, y1, 1000);
    CAPTURE(i);
    CHECK((area > 0.0) == (ref > 0.0));
    CHECK(std::abs(area - ref) <= std::max(0.01 * ref, 1e-4));
    positive += area > 0.0;
  }
  CHECK(positive > 100);
}

TEST_CASE("overlap symmetry, sign and monotonicity") {
  test::Gen g(34);
  for (int i = 0; i < 1000; ++i) {
    const Box2D p = random_box(g), q = random_box(g);
    const double a = overlap_area(p, q).area;
    CHECK(a >= 0.0);
    CHECK(a == overlap_area(q, p).area);
    Box2D big = p;
    big.lower -= Eigen::Vector2d(g.uniform(0, 2), g.uniform(0, 2));
    big.upper += Eigen::Vector2d(g.uniform(0, 2), g.uniform(0, 2));
    CHECK(overlap_area(big, q).area >= a);
  }
}

TEST_CASE("collision-avoidance overlap and its gradient") {
  const AgentGeometry geom;
  const SafetyParams safety;
  test::Gen g(35);
  int checked = 0;
  for (int i = 0; i < 2000 && checked < 200; ++i) {
    const Pose2D ego{0, 0, g.uniform(-pi, pi), g.uniform(0, 15)};
    const Pose2D other{g.uniform(-20, 20), g.uniform(-20, 20), g.uniform(-pi, pi),
                       g.uniform(0, 15)};
    const auto gr = ca_overlap_gradient(ego, geom, safety, other, geom);
    CHECK(gr.area == ca_overlap(ego, geom, safety, other, geom));
    if (gr.area < 1e-3)
      continue;
    const double h = 1e-7;
    auto f = [&](double dx, double dy, double dpsi, double dv) {
      return ca_overlap({ego.x + dx, ego.y + dy, ego.psi + dpsi, ego.v + dv}, geom, safety,
                        other, geom);
    };
    const double fd[4] = {(f(h, 0, 0, 0) - f(-h, 0, 0, 0)) / (2 * h),
                          (f(0, h, 0, 0) - f(0, -h, 0, 0)) / (2 * h),
                          (f(0, 0, h, 0) - f(0, 0, -h, 0)) / (2 * h),
                          (f(0, 0, 0, h) - f(0, 0, 0, -h)) / (2 * h)};
    // Skip samples within reach of a min/max kink: one-sided slopes differ.
    const double fwd[4] = {(f(1e-4, 0, 0, 0) - gr.area) / 1e-4, (f(0, 1e-4, 0, 0) - gr.area) / 1e-4,
                           (f(0, 0, 1e-4, 0) - gr.area) / 1e-4, (f(0, 0, 0, 1e-4) - gr.area) / 1e-4};
    const double an[4] = {gr.d_x, gr.d_y, gr.d_psi, gr.d_v};
    bool smooth = true;
    for (int k = 0; k < 4; ++k)
      smooth = smooth && std::abs(fwd[k] - fd[k]) <= 1e-3 * (1 + std::abs(fd[k]));
    if (!smooth)
      continue;
    for (int k = 0; k < 4; ++k)
      CHECK(std::abs(an[k] - fd[k]) <= 1e-5 * std::max(1.0, std::abs(fd[k])));
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("signed clearance") {
  const AgentGeometry geom;
  const SafetyParams safety;
  // ego at rest: region [-4.5, 4.5] x [-2, 2]
  CHECK(region_clearance({0, 0, 0, 0}, geom, safety, {10, 0, 0, 0}, geom) ==
        doctest::Approx(3.0));
  CHECK(region_clearance({0, 0, 0, 0}, geom, safety, {6, 0, 0, 0}, geom) ==
        doctest::Approx(-1.0));
  CHECK(region_clearance({0, 0, 0, 0}, geom, safety, {10, 7, 0, 0}, geom) ==
        doctest::Approx(std::hypot(3.0, 4.0)));
}

TEST_CASE("exact footprint intersection against rasterization") {
  const AgentGeometry ga{5, 2}, gb{4, 1.8};
  test::Gen g(36);
  for (int i = 0; i < 100; ++i) {
    const Pose2D a{0, 0, g.uniform(-pi, pi), 0};
    const Pose2D b{g.uniform(-5, 5), g.uniform(-4, 4), g.uniform(-pi, pi), 0};
    const auto fa = footprint(a, ga), fb = footprint(b, gb);
    const int n = 600;
    const double h = 12.0 / n;
    long count = 0;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        const Eigen::Vector2d q(-6 + (x + 0.5) * h, -6 + (y + 0.5) * h);
        count += in_polygon(fa, q) && in_polygon(fb, q);
      }
    const double ref = count * h * h;
    CHECK(std::abs(footprint_overlap(a, ga, b, gb) - ref) <= std::max(0.02 * ref, 0.05));
  }
  CHECK(footprint_overlap({0, 0, 0, 0}, ga, {100, 0, 0, 0}, ga) == 0.0);
  CHECK(footprint_overlap({0, 0, 0, 0}, ga, {0, 0, 0, 0}, ga) == doctest::Approx(10.0));
}
