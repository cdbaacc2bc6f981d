#pragma once

#include <cmath>

#include "rgeom/errors.hpp"
#include "rgeom/linalg.hpp"

namespace rgeom {

/// Scalar with exact first and second derivatives with respect to n chart
/// coordinates (second-order forward mode). The Hessian is kept full but
/// stays symmetric under all operations below.
struct Jet2 {
  double v = 0.0;
  Vec g;    // gradient, length n
  Mat h;    // Hessian, n x n

  Jet2() = default;
  explicit Jet2(int n) : g(n), h(n, n) {}

  static Jet2 constant(int n, double value) {
    Jet2 j(n);
    j.v = value;
    return j;
  }

  static Jet2 variable(int n, int index, double value) {
    Jet2 j(n);
    j.v = value;
    j.g[index] = 1.0;
    return j;
  }

  int dim() const { return g.size(); }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  Jet2 r = a;
  r.v += b.v;
  r.g += b.g;
  r.h += b.h;
  return r;
}

inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  Jet2 r = a;
  r.v -= b.v;
  r.g -= b.g;
  r.h -= b.h;
  return r;
}

inline Jet2 operator-(const Jet2& a) {
  Jet2 r = a;
  r.v = -r.v;
  r.g *= -1.0;
  r.h *= -1.0;
  return r;
}

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r(a.dim());
  r.v = a.v * b.v;
  for (int i = 0; i < a.dim(); ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      r.h(i, j) = a.h(i, j) * b.v + a.g[i] * b.g[j] + a.g[j] * b.g[i] +
                  a.v * b.h(i, j);
  return r;
}

/// Chain rule for f(u): needs f(u), f'(u), f''(u).
inline Jet2 compose(const Jet2& u, double f, double df, double ddf) {
  Jet2 r(u.dim());
  r.v = f;
  for (int i = 0; i < u.dim(); ++i) r.g[i] = df * u.g[i];
  for (int i = 0; i < u.dim(); ++i)
    for (int j = 0; j < u.dim(); ++j)
      r.h(i, j) = df * u.h(i, j) + ddf * u.g[i] * u.g[j];
  return r;
}

inline Jet2 operator/(const Jet2& a, const Jet2& b) {
  if (b.v == 0.0) throw DomainError("division by zero in metric expression");
  const double inv = 1.0 / b.v;
  return a * compose(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet2 sin(const Jet2& u) { return compose(u, std::sin(u.v), std::cos(u.v), -std::sin(u.v)); }
inline Jet2 cos(const Jet2& u) { return compose(u, std::cos(u.v), -std::sin(u.v), -std::cos(u.v)); }
inline Jet2 sinh(const Jet2& u) { return compose(u, std::sinh(u.v), std::cosh(u.v), std::sinh(u.v)); }
inline Jet2 cosh(const Jet2& u) { return compose(u, std::cosh(u.v), std::sinh(u.v), std::cosh(u.v)); }
inline Jet2 exp(const Jet2& u) {
  const double e = std::exp(u.v);
  return compose(u, e, e, e);
}

inline Jet2 log(const Jet2& u) {
  if (!(u.v > 0.0)) throw DomainError("ln of non-positive value in metric expression");
  const double inv = 1.0 / u.v;
  return compose(u, std::log(u.v), inv, -inv * inv);
}

inline Jet2 sqrt(const Jet2& u) {
  if (!(u.v > 0.0)) throw DomainError("sqrt of non-positive value in metric expression");
  const double s = std::sqrt(u.v);
  return compose(u, s, 0.5 / s, -0.25 / (s * u.v));
}

/// Integer power by repeated squaring on jets.
inline Jet2 pow_int(const Jet2& u, int e) {
  if (e == 0) return Jet2::constant(u.dim(), 1.0);
  bool invert = e < 0;
  unsigned long long k = invert ? static_cast<unsigned long long>(-(long long)e)
                                : static_cast<unsigned long long>(e);
  Jet2 acc = Jet2::constant(u.dim(), 1.0);
  Jet2 base = u;
  while (k) {
    if (k & 1ULL) acc = acc * base;
    k >>= 1;
    if (k) base = base * base;
  }
  if (invert) return Jet2::constant(u.dim(), 1.0) / acc;
  return acc;
}

}  // namespace rgeom
