#include "dmpc/panoc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace dmpc {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double x : a)
    m = std::max(m, std::abs(x));
  return m;
}

/// Limited-memory inverse Hessian approximation of the fixed-point residual map.
class Lbfgs {
public:
  explicit Lbfgs(int memory) : memory_(memory) {}

  void reset() { pairs_.clear(); }

  /// Returns false (and clears the memory) when the curvature condition fails.
  bool update(std::vector<double> s, std::vector<double> y) {
    const double sy = dot(s, y);
    const double ss = dot(s, s);
    if (!(sy > 1e-12 * ss) || !std::isfinite(sy)) {
      reset();
      return false;
    }
    if (static_cast<int>(pairs_.size()) == memory_)
      pairs_.pop_front();
    pairs_.push_back({std::move(s), std::move(y), 1.0 / sy});
    return true;
  }

  /// d = -H r (two-loop recursion, H0 scaled by s'y / y'y).
  void direction(std::span<const double> r, std::span<double> d) const {
    std::copy(r.begin(), r.end(), d.begin());
    if (pairs_.empty()) {
      for (double &x : d)
        x = -x;
      return;
    }
    std::vector<double> alpha(pairs_.size());
    for (std::size_t k = pairs_.size(); k-- > 0;) {
      const auto &p = pairs_[k];
      alpha[k] = p.rho * dot(p.s, d);
      for (std::size_t i = 0; i < d.size(); ++i)
        d[i] -= alpha[k] * p.y[i];
    }
    const auto &last = pairs_.back();
    const double h0 = 1.0 / (last.rho * dot(last.y, last.y));
    for (double &x : d)
      x *= h0;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const auto &p = pairs_[k];
      const double beta = p.rho * dot(p.y, d);
      for (std::size_t i = 0; i < d.size(); ++i)
        d[i] += (alpha[k] - beta) * p.s[i];
    }
    for (double &x : d)
      x = -x;
  }

private:
  struct Pair {
    std::vector<double> s, y;
    double rho;
  };
  int memory_;
  std::deque<Pair> pairs_;
};

/// Iterate together with everything derived from it for a given gamma.
struct Point {
  std::vector<double> u, grad, xbar, r;
  double f = 0.0;     // phi(u)
  double fbar = 0.0;  // phi(T(u))
  double fbe = 0.0;

  explicit Point(std::size_t n) : u(n), grad(n), xbar(n), r(n) {}
};

}  // namespace

bool BoxSet::valid() const {
  if (lower.size() != upper.size())
    return false;
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(lower[i] <= upper[i]))
      return false;
  return true;
}

bool SolverConfig::valid() const {
  return tolerance > 0.0 && intermediate_tolerance > 0.0 && max_iterations > 0 &&
         lbfgs_memory >= 1 && lipschitz_delta > 0.0 && gamma_factor > 0.0 &&
         gamma_factor < 1.0 && shrink > 0.0 && shrink < 1.0 && sufficient_decrease >= 0.0 &&
         min_tau > 0.0 && min_tau < 1.0;
}

void project_box(std::span<const double> u, const BoxSet &box, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = std::clamp(u[i], box.lower[i], box.upper[i]);
}

std::vector<double> project_box(std::span<const double> u, const BoxSet &box) {
  std::vector<double> out(u.size());
  project_box(u, box, out);
  return out;
}

double fbe_value(std::span<const double> u, double cost, std::span<const double> grad,
                 double gamma, const BoxSet &box) {
  double lin = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double t = std::clamp(u[i] - gamma * grad[i], box.lower[i], box.upper[i]);
    const double step = t - u[i];
    lin += grad[i] * step;
    sq += step * step;
  }
  return cost + lin + sq / (2.0 * gamma);
}

std::string_view to_string(PanocStatus s) {
  return s == PanocStatus::Converged ? "converged" : "max_iterations";
}

PanocResult panoc_solve(const SmoothCost &cost, const BoxSet &box,
                        std::span<const double> u_init, const SolverConfig &cfg) {
  const std::size_t n = cost.dimension();
  if (u_init.size() != n || box.size() != n)
    throw std::invalid_argument("panoc_solve: dimension mismatch");

  PanocResult res;
  Point cur(n), cand(n);
  project_box(u_init, box, cur.u);
  cur.f = cost.value_and_gradient(cur.u, cur.grad);

  // Lipschitz estimate of the gradient from a finite-difference probe.
  double lipschitz;
  {
    const double u_norm = std::sqrt(dot(cur.u, cur.u));
    const double h = cfg.lipschitz_delta * (1.0 + u_norm);
    std::vector<double> probe(cur.u), probe_grad(n);
    for (double &x : probe)
      x += h;
    cost.value_and_gradient(probe, probe_grad);
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      diff += (probe_grad[i] - cur.grad[i]) * (probe_grad[i] - cur.grad[i]);
    lipschitz = std::sqrt(diff) / (h * std::sqrt(static_cast<double>(n)));
    if (!(lipschitz > 1e-8) || !std::isfinite(lipschitz))
      lipschitz = 1e-8;
  }
  double gamma = cfg.gamma_factor / lipschitz;

  auto forward_backward = [&](Point &p) {
    for (std::size_t i = 0; i < n; ++i) {
      p.xbar[i] = std::clamp(p.u[i] - gamma * p.grad[i], box.lower[i], box.upper[i]);
      p.r[i] = p.u[i] - p.xbar[i];
    }
    p.fbar = cost.value(p.xbar);
  };
  // Descent lemma at T(u) with the current Lipschitz estimate.
  auto descent_ok = [&](const Point &p) {
    const double rr = dot(p.r, p.r);
    const double bound = p.f - dot(p.grad, p.r) + 0.5 * lipschitz * rr;
    return p.fbar <= bound + 1e-12 * (1.0 + std::abs(p.f));
  };
  auto envelope = [&](const Point &p) {
    return p.f - dot(p.grad, p.r) + dot(p.r, p.r) / (2.0 * gamma);
  };
  auto settle = [&](Point &p) {
    forward_backward(p);
    while (!descent_ok(p) && gamma > 1e-300) {
      lipschitz *= 2.0;
      gamma = cfg.gamma_factor / lipschitz;
      forward_backward(p);
    }
    p.fbe = envelope(p);
  };

  settle(cur);
  if (cfg.record_fbe)
    res.fbe_runs.push_back({cur.fbe});

  Lbfgs lbfgs(cfg.lbfgs_memory);
  std::vector<double> dir(n);
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    const double resid = norm_inf(cur.r) / gamma;
    if (resid <= cfg.tolerance) {
      res.status = PanocStatus::Converged;
      break;
    }

    lbfgs.direction(cur.r, dir);
    const double rr = dot(cur.r, cur.r);
    const double required = cur.fbe - cfg.sufficient_decrease / gamma * rr;

    double tau = 1.0;
    bool gamma_changed = false;
    for (;;) {
      for (std::size_t i = 0; i < n; ++i)
        cand.u[i] = cur.u[i] - (1.0 - tau) * cur.r[i] + tau * dir[i];
      cand.f = cost.value_and_gradient(cand.u, cand.grad);
      forward_backward(cand);
      if (!descent_ok(cand)) {
        // Step size too long for the local curvature: shrink it and restart
        // the iteration from the current point.
        lipschitz *= 2.0;
        gamma = cfg.gamma_factor / lipschitz;
        lbfgs.reset();
        settle(cur);
        if (cfg.record_fbe)
          res.fbe_runs.push_back({cur.fbe});
        gamma_changed = true;
        break;
      }
      cand.fbe = envelope(cand);
      if (cand.fbe <= required || tau == 0.0)
        break;
      tau *= cfg.shrink;
      if (tau < cfg.min_tau) {
        tau = 0.0;
        ++res.line_search_stalls;
      }
    }
    if (gamma_changed)
      continue;

    std::vector<double> s(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = cand.u[i] - cur.u[i];
      y[i] = cand.r[i] - cur.r[i];
    }
    lbfgs.update(std::move(s), std::move(y));
    std::swap(cur, cand);
    if (cfg.record_fbe)
      res.fbe_runs.back().push_back(cur.fbe);
  }

  res.iterations = it;
  res.gamma = gamma;
  res.residual = norm_inf(cur.r) / gamma;
  res.u = cur.xbar;
  return res;
}

}  // namespace dmpc
