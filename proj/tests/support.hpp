#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "dmpc/path_geometry.hpp"

namespace dmpc::test {

// Fixed-seed generators for property tests.
class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::vector<double> vec(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto &x : v)
      x = uniform(lo, hi);
    return v;
  }

private:
  std::mt19937_64 rng_;
};

// Samples every `spacing` metres along a straight segment, endpoints included.
inline std::vector<Waypoint> line_points(double x0, double y0, double x1, double y1,
                                         double spacing) {
  const double len = std::hypot(x1 - x0, y1 - y0);
  const int n = static_cast<int>(std::ceil(len / spacing));
  std::vector<Waypoint> out;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    out.push_back({x0 + t * (x1 - x0), y0 + t * (y1 - y0)});
  }
  return out;
}

// Arc of radius r around (cx, cy) from angle a0 to a1, about `spacing` apart.
inline std::vector<Waypoint> arc_points(double cx, double cy, double r, double a0, double a1,
                                        double spacing) {
  const int n = static_cast<int>(std::ceil(std::abs(a1 - a0) * r / spacing));
  std::vector<Waypoint> out;
  for (int i = 0; i <= n; ++i) {
    const double a = a0 + (a1 - a0) * i / n;
    out.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
  }
  return out;
}

}  // namespace dmpc::test
