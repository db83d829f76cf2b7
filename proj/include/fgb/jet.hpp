#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fgb {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Truncated bivariate Taylor polynomial in (u, v) around a base point.
// c[index(i, j)] is the coefficient of du^i dv^j, i + j <= N.
template <int N>
struct Jet {
  static_assert(N >= 0 && N <= 4);
  static constexpr int order = N;
  static constexpr int size = (N + 1) * (N + 2) / 2;

  std::array<double, size> c{};

  static constexpr int index(int i, int j) {
    int d = i + j;
    return d * (d + 1) / 2 + j;
  }

  static Jet constant(double x) {
    Jet r;
    r.c[0] = x;
    return r;
  }
  static Jet var_u(double u0) {
    Jet r;
    r.c[0] = u0;
    if constexpr (N >= 1) r.c[index(1, 0)] = 1.0;
    return r;
  }
  static Jet var_v(double v0) {
    Jet r;
    r.c[0] = v0;
    if constexpr (N >= 1) r.c[index(0, 1)] = 1.0;
    return r;
  }

  double value() const { return c[0]; }
  double coeff(int i, int j) const { return i + j <= N ? c[index(i, j)] : 0.0; }
  // ∂^{i+j} / ∂u^i ∂v^j at the base point
  double d(int i, int j) const {
    static constexpr double fact[] = {1, 1, 2, 6, 24};
    return coeff(i, j) * fact[i] * fact[j];
  }
  double du() const { return d(1, 0); }
  double dv() const { return d(0, 1); }

  // Partial derivative as a jet of the same type; the top order is lost (left 0).
  Jet diff_u() const {
    Jet r;
    for (int d = 0; d < N; ++d)
      for (int j = 0; j <= d; ++j) {
        int i = d - j;
        r.c[index(i, j)] = (i + 1) * c[index(i + 1, j)];
      }
    return r;
  }
  Jet diff_v() const {
    Jet r;
    for (int d = 0; d < N; ++d)
      for (int j = 0; j <= d; ++j) {
        int i = d - j;
        r.c[index(i, j)] = (j + 1) * c[index(i, j + 1)];
      }
    return r;
  }

  template <int M>
  Jet<M> truncate() const {
    static_assert(M <= N);
    Jet<M> r;
    for (int k = 0; k < Jet<M>::size; ++k) r.c[k] = c[k];
    return r;
  }

  bool finite() const {
    for (double x : c)
      if (!std::isfinite(x)) return false;
    return true;
  }

  Jet operator-() const {
    Jet r;
    for (int k = 0; k < size; ++k) r.c[k] = -c[k];
    return r;
  }
  Jet& operator+=(const Jet& o) {
    for (int k = 0; k < size; ++k) c[k] += o.c[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k < size; ++k) c[k] -= o.c[k];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& x : c) x *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    c[0] += s;
    return *this;
  }
};

template <int N>
inline Jet<N> operator+(Jet<N> a, const Jet<N>& b) { return a += b; }
template <int N>
inline Jet<N> operator-(Jet<N> a, const Jet<N>& b) { return a -= b; }
template <int N>
inline Jet<N> operator+(Jet<N> a, double s) { return a += s; }
template <int N>
inline Jet<N> operator+(double s, Jet<N> a) { return a += s; }
template <int N>
inline Jet<N> operator-(Jet<N> a, double s) { return a += -s; }
template <int N>
inline Jet<N> operator-(double s, const Jet<N>& a) { return (-a) += s; }
template <int N>
inline Jet<N> operator*(Jet<N> a, double s) { return a *= s; }
template <int N>
inline Jet<N> operator*(double s, Jet<N> a) { return a *= s; }
template <int N>
inline Jet<N> operator/(Jet<N> a, double s) { return a *= 1.0 / s; }

template <int N>
inline Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  using J = Jet<N>;
  J r;
  for (int d1 = 0; d1 <= N; ++d1)
    for (int j1 = 0; j1 <= d1; ++j1) {
      double x = a.c[J::index(d1 - j1, j1)];
      if (x == 0.0) continue;
      for (int d2 = 0; d2 <= N - d1; ++d2)
        for (int j2 = 0; j2 <= d2; ++j2)
          r.c[J::index(d1 - j1 + d2 - j2, j1 + j2)] += x * b.c[J::index(d2 - j2, j2)];
    }
  return r;
}

// g(a) from the derivatives g^(k)(a0), k = 0..N, by Horner in h = a - a0.
template <int N>
inline Jet<N> compose(const Jet<N>& a, const std::array<double, N + 1>& g) {
  static constexpr double fact[] = {1, 1, 2, 6, 24};
  Jet<N> h = a;
  h.c[0] = 0.0;
  Jet<N> r = Jet<N>::constant(g[N] / fact[N]);
  for (int k = N - 1; k >= 0; --k) {
    r = r * h;
    r.c[0] += g[k] / fact[k];
  }
  return r;
}

// derivatives of x^p at x0
template <int N>
inline std::array<double, N + 1> power_derivs(double x0, double p) {
  std::array<double, N + 1> g{};
  double coef = 1.0;
  for (int k = 0; k <= N; ++k) {
    g[k] = coef * std::pow(x0, p - k);
    coef *= (p - k);
  }
  return g;
}

template <int N>
inline Jet<N> inv(const Jet<N>& a) {
  if (a.c[0] == 0.0) throw EvalError("division by zero");
  return compose(a, power_derivs<N>(a.c[0], -1.0));
}

template <int N>
inline Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) { return a * inv(b); }
template <int N>
inline Jet<N> operator/(double s, const Jet<N>& b) { return s * inv(b); }

template <int N>
inline Jet<N> sqrt(const Jet<N>& a) {
  double x = a.c[0];
  if (x < 0.0) throw EvalError("sqrt of negative argument");
  if (x == 0.0) {
    if constexpr (N == 0) return Jet<N>::constant(0.0);
    throw EvalError("sqrt not differentiable at 0");
  }
  return compose(a, power_derivs<N>(x, 0.5));
}

template <int N>
inline Jet<N> exp(const Jet<N>& a) {
  std::array<double, N + 1> g;
  g.fill(std::exp(a.c[0]));
  return compose(a, g);
}

template <int N>
inline Jet<N> log(const Jet<N>& a) {
  double x = a.c[0];
  if (x <= 0.0) throw EvalError("log of non-positive argument");
  std::array<double, N + 1> g;
  g[0] = std::log(x);
  double coef = 1.0;
  for (int k = 1; k <= N; ++k) {
    g[k] = coef / std::pow(x, k);
    coef *= -double(k);
  }
  return compose(a, g);
}

template <int N>
inline Jet<N> sin(const Jet<N>& a) {
  double s = std::sin(a.c[0]), co = std::cos(a.c[0]);
  const double cyc[4] = {s, co, -s, -co};
  std::array<double, N + 1> g;
  for (int k = 0; k <= N; ++k) g[k] = cyc[k % 4];
  return compose(a, g);
}

template <int N>
inline Jet<N> cos(const Jet<N>& a) {
  double s = std::sin(a.c[0]), co = std::cos(a.c[0]);
  const double cyc[4] = {co, -s, -co, s};
  std::array<double, N + 1> g;
  for (int k = 0; k <= N; ++k) g[k] = cyc[k % 4];
  return compose(a, g);
}

template <int N>
inline Jet<N> sinh(const Jet<N>& a) {
  double s = std::sinh(a.c[0]), co = std::cosh(a.c[0]);
  std::array<double, N + 1> g;
  for (int k = 0; k <= N; ++k) g[k] = k % 2 ? co : s;
  return compose(a, g);
}

template <int N>
inline Jet<N> cosh(const Jet<N>& a) {
  double s = std::sinh(a.c[0]), co = std::cosh(a.c[0]);
  std::array<double, N + 1> g;
  for (int k = 0; k <= N; ++k) g[k] = k % 2 ? s : co;
  return compose(a, g);
}

template <int N>
inline Jet<N> tan(const Jet<N>& a) {
  if (std::cos(a.c[0]) == 0.0) throw EvalError("tan at pole");
  return sin(a) / cos(a);
}

template <int N>
inline Jet<N> tanh(const Jet<N>& a) { return sinh(a) / cosh(a); }

template <int N>
inline Jet<N> pow(const Jet<N>& a, int n) {
  if (n < 0) return inv(pow(a, -n));
  Jet<N> r = Jet<N>::constant(1.0), base = a;
  while (n) {
    if (n & 1) r = r * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return r;
}

using Jet1 = Jet<1>;
using Jet2 = Jet<2>;
using Jet3 = Jet<3>;

}  // namespace fgb
