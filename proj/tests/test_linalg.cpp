#include <doctest.h>

#include <cmath>

#include "rgeom/linalg.hpp"
#include "rgeom/rng.hpp"

using namespace rgeom;

TEST_CASE("cholesky of diagonal metric") {
  Mat g(2, 2);
  g(0, 0) = 0.25;
  g(1, 1) = 0.25;
  const Mat L = cholesky_lower(g);
  CHECK(L(0, 0) == doctest::Approx(0.5));
  CHECK(L(1, 1) == doctest::Approx(0.5));
  CHECK(L(1, 0) == 0.0);
}

TEST_CASE("cholesky rejects indefinite matrices") {
  Mat g(2, 2);
  g(0, 0) = 1.0;
  g(1, 1) = -1.0;
  CHECK_THROWS_AS(cholesky_lower(g), DomainError);
}

TEST_CASE("cholesky differential matches finite differences") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform(0.0, 2.0));
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    Mat g = a.multiply(a.transposed());
    for (int i = 0; i < n; ++i) g(i, i) += n;  // well conditioned
    Mat dg(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) dg(i, j) = dg(j, i) = rng.uniform(-1.0, 1.0);

    const Mat L = cholesky_lower(g);
    const Mat dL = cholesky_lower_differential(L, dg);

    const double h = 1e-6;
    const Mat Lp = cholesky_lower(g + h * dg);
    const Mat Lm = cholesky_lower(g - h * dg);
    const Mat fd = (Lp - Lm) * (1.0 / (2.0 * h));
    CHECK(norm_inf(fd - dL) < 1e-8);
  }
}

TEST_CASE("triangular and general inverses") {
  Rng rng(5);
  Mat a(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = rng.uniform(0.5, 2.0);
  const Mat inv = invert_lower_triangular(a);
  CHECK(identity_distance(a.multiply(inv)) < 1e-13);

  Mat b(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = rng.uniform(-1.0, 1.0);
  b(0, 0) += 3.0;
  b(1, 1) += 3.0;
  b(2, 2) += 3.0;
  CHECK(identity_distance(b.multiply(invert(b))) < 1e-12);

  Vec rhs{1.0, -2.0, 0.5};
  const Vec x = solve(b, rhs);
  CHECK(norm(b.apply(x) - rhs) < 1e-12);
}

TEST_CASE("tensor contractions") {
  Tensor3 t(2);
  t(0, 0, 1) = 2.0;
  t(1, 1, 0) = -1.0;
  Vec a{1.0, 2.0}, b{3.0, 4.0};
  const Vec r = t.apply(a, b);
  CHECK(r[0] == doctest::Approx(1.0 * 4.0 * 2.0));
  CHECK(r[1] == doctest::Approx(2.0 * 3.0 * -1.0));
}
