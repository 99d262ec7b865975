#include "doctest.h"

#include <cmath>

#include "dmpc/kinematics.hpp"
#include "support.hpp"

using namespace dmpc;

namespace {

// exp of the augmented generator [[A, B], [0, 0]] by classical RK4.
Eigen::Matrix4d rk4_transition(const ContinuousModel &m, double ts, double h) {
  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  g.topLeftCorner<3, 3>() = m.A;
  g.topRightCorner<3, 1>() = m.B;
  const int steps = static_cast<int>(std::llround(ts / h));
  h = ts / steps;
  Eigen::Matrix4d x = Eigen::Matrix4d::Identity();
  for (int i = 0; i < steps; ++i) {
    const Eigen::Matrix4d k1 = g * x;
    const Eigen::Matrix4d k2 = g * (x + 0.5 * h * k1);
    const Eigen::Matrix4d k3 = g * (x + 0.5 * h * k2);
    const Eigen::Matrix4d k4 = g * (x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace

TEST_CASE("continuous matrices") {
  auto m = continuous_matrices({1.0, 0.1});
  CHECK(m.A(0, 0) == -1.0);
  CHECK(m.A(0, 1) == 0.0);
  CHECK(m.A(0, 2) == 0.0);
  CHECK(m.B == Eigen::Vector3d(1, 0, 0));
  CHECK(continuous_matrices({0.3, 0.1}).A(0, 0) == doctest::Approx(-10.0 / 3.0).epsilon(1e-15));
  CHECK(continuous_matrices({0.5, 0.1}).B[0] == 2.0);
}

TEST_CASE("zero sampling time gives identity") {
  const auto d = discretize_exact(continuous_matrices({0.3, 0.1}), 0.0);
  CHECK(d.A.isApprox(Eigen::Matrix3d::Identity()));
  CHECK(d.B.norm() == 0.0);
}

TEST_CASE("negative sampling time rejected") {
  CHECK_THROWS_AS(discretize_exact(continuous_matrices({0.3, 0.1}), -0.1), std::invalid_argument);
}

TEST_CASE("lag pole") {
  const auto d = discretize({0.3, 0.1});
  CHECK(d.A(0, 0) == doctest::Approx(std::exp(-1.0 / 3.0)).epsilon(1e-15));
  CHECK(d.A(0, 0) == doctest::Approx(0.716531).epsilon(1e-6));
}

TEST_CASE("discretization matches RK4 oracle") {
  for (double ts : {0.01, 0.1, 1.0})
    for (double tax : {0.1, 0.3, 1.0}) {
      CAPTURE(ts);
      CAPTURE(tax);
      const auto m = continuous_matrices({tax, ts});
      const auto d = discretize_exact(m, ts);
      const Eigen::Matrix4d ref = rk4_transition(m, ts, 1e-6);
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c)
          CHECK(std::abs(d.A(r, c) - ref(r, c)) <= 1e-9);
        CHECK(std::abs(d.B[r] - ref(r, 3)) <= 1e-9);
      }
    }
}

TEST_CASE("discrete matrix structure") {
  const auto d = discretize({0.3, 0.1});
  CHECK(d.A(0, 1) == 0.0);
  CHECK(d.A(0, 2) == 0.0);
  CHECK(d.A(1, 2) == 0.0);
  CHECK(d.A(1, 1) == 1.0);
  CHECK(d.A(2, 2) == 1.0);
}

TEST_CASE("rollout at zero input is constant speed") {
  const auto d = discretize({0.3, 0.1});
  const std::vector<double> u(20, 0.0);
  const auto x = rollout(d, {0.0, 7.5, 0.0}, u);
  REQUIRE(x.size() == 21);
  for (std::size_t j = 0; j < x.size(); ++j) {
    CHECK(x[j].v == 7.5);
    CHECK(x[j].s == doctest::Approx(7.5 * 0.1 * j).epsilon(1e-14));
  }
}

TEST_CASE("rollout recursion oracle") {
  const auto d = discretize({0.3, 0.1});
  const std::vector<double> u(50, 4.0);
  const auto x = rollout(d, {0.0, 14.0, 0.0}, u);
  Eigen::Vector3d ref(0.0, 14.0, 0.0);
  for (int j = 0; j < 50; ++j)
    ref = d.A * ref + d.B * 4.0;
  CHECK(x.back().v == doctest::Approx(ref[1]).epsilon(1e-14));
  // lag settled: v_N = 14 + 4 (5 - 0.3 (1 - e^{-5/0.3}))
  CHECK(x.back().v == doctest::Approx(14.0 + 4.0 * (5.0 - 0.3 * (1.0 - std::exp(-5.0 / 0.3)))));
}

TEST_CASE("rollout superposition") {
  test::Gen gen(11);
  const auto d = discretize({0.3, 0.1});
  for (int trial = 0; trial < 20; ++trial) {
    const auto u1 = gen.vec(30, -7, 4);
    const auto u2 = gen.vec(30, -7, 4);
    std::vector<double> sum(30);
    for (int i = 0; i < 30; ++i)
      sum[i] = u1[i] + u2[i];
    const AgentState x0{gen.uniform(-2, 2), gen.uniform(0, 15), gen.uniform(0, 50)};
    const auto a = rollout(d, x0, sum);
    const auto b = rollout(d, x0, u2);
    const auto c = rollout(d, {}, u1);
    for (std::size_t j = 0; j < a.size(); ++j)
      CHECK((a[j].vec() - b[j].vec() - c[j].vec()).norm() <= 1e-10 * (1.0 + a[j].vec().norm()));
  }
}

TEST_CASE("steady-state gain of the lag is one") {
  const auto d = discretize({0.3, 2.0});
  const std::vector<double> u(10, 2.5);
  CHECK(rollout(d, {}, u).back().a_x == doctest::Approx(2.5).epsilon(1e-12));
}
