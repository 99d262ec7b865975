#pragma once

#include <array>
#include <cmath>

namespace dmpc::detail {

/// Forward-mode dual number with a fixed number of partials. Branching
/// helpers (max/min/abs) pick the first argument on ties, which gives a zero
/// derivative at max{0, x} kinks.
template <int K>
struct Dual {
  double v = 0.0;
  std::array<double, K> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)

  static Dual seed(double value, int i) {
    Dual r(value);
    r.d[i] = 1.0;
    return r;
  }
};

template <int K>
Dual<K> operator+(const Dual<K> &a, const Dual<K> &b) {
  Dual<K> r(a.v + b.v);
  for (int i = 0; i < K; ++i)
    r.d[i] = a.d[i] + b.d[i];
  return r;
}
template <int K>
Dual<K> operator-(const Dual<K> &a, const Dual<K> &b) {
  Dual<K> r(a.v - b.v);
  for (int i = 0; i < K; ++i)
    r.d[i] = a.d[i] - b.d[i];
  return r;
}
template <int K>
Dual<K> operator-(const Dual<K> &a) {
  Dual<K> r(-a.v);
  for (int i = 0; i < K; ++i)
    r.d[i] = -a.d[i];
  return r;
}
template <int K>
Dual<K> operator*(const Dual<K> &a, const Dual<K> &b) {
  Dual<K> r(a.v * b.v);
  for (int i = 0; i < K; ++i)
    r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
template <int K>
Dual<K> operator+(const Dual<K> &a, double b) { return a + Dual<K>(b); }
template <int K>
Dual<K> operator+(double a, const Dual<K> &b) { return Dual<K>(a) + b; }
template <int K>
Dual<K> operator-(const Dual<K> &a, double b) { return a - Dual<K>(b); }
template <int K>
Dual<K> operator-(double a, const Dual<K> &b) { return Dual<K>(a) - b; }
template <int K>
Dual<K> operator*(const Dual<K> &a, double b) {
  Dual<K> r(a.v * b);
  for (int i = 0; i < K; ++i)
    r.d[i] = a.d[i] * b;
  return r;
}
template <int K>
Dual<K> operator*(double a, const Dual<K> &b) { return b * a; }

template <int K>
Dual<K> sin(const Dual<K> &a) {
  Dual<K> r(std::sin(a.v));
  const double c = std::cos(a.v);
  for (int i = 0; i < K; ++i)
    r.d[i] = c * a.d[i];
  return r;
}
template <int K>
Dual<K> cos(const Dual<K> &a) {
  Dual<K> r(std::cos(a.v));
  const double s = -std::sin(a.v);
  for (int i = 0; i < K; ++i)
    r.d[i] = s * a.d[i];
  return r;
}

inline double value(double x) { return x; }
template <int K>
double value(const Dual<K> &x) { return x.v; }

template <class T>
T max_of(const T &a, const T &b) { return value(a) >= value(b) ? a : b; }
template <class T>
T min_of(const T &a, const T &b) { return value(a) <= value(b) ? a : b; }
template <class T>
T plus(const T &a) { return value(a) > 0.0 ? a : T(0.0); }
template <class T>
T abs_of(const T &a) { return value(a) > 0.0 ? a : (value(a) < 0.0 ? -a : T(0.0)); }

}  // namespace dmpc::detail
