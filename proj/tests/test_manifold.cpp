#include <doctest.h>

#include <cmath>

#include "rgeom/builtins.hpp"
#include "rgeom/manifold.hpp"
#include "rgeom/rng.hpp"
#include "rgeom/suite.hpp"

using namespace rgeom;

TEST_CASE("euclidean plane: identity metric, flat connection") {
  const Manifold m(make_euclidean_source(2));
  const ChartPoint x(Vec{0.3, -1.2});
  const MetricJet jet = m.metric_at(x);
  CHECK(identity_distance(jet.g) == 0.0);
  CHECK(norm_inf(jet.dg) == 0.0);
  const FramePair f = m.frame_at(x);
  CHECK(identity_distance(f.h) == 0.0);
  CHECK(norm_inf(m.christoffel_at(x).gamma) == 0.0);
  CHECK(norm_inf(m.gamma_at(x)) == 0.0);
  CHECK(norm_inf(m.anholonomy_at(x)) == 0.0);
  CHECK(norm_inf(m.riemann_classical_at(x)) == 0.0);
}

TEST_CASE("sphere metric values") {
  const Manifold m(make_sphere_source());
  const MetricJet equator = m.metric_at(ChartPoint(Vec{M_PI / 2.0, 0.4}));
  CHECK(equator.g(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(equator.g(1, 1) == doctest::Approx(1.0).epsilon(1e-12));

  const MetricJet mid = m.metric_at(ChartPoint(Vec{M_PI / 4.0, -0.3}));
  CHECK(mid.g(1, 1) == doctest::Approx(0.5).epsilon(1e-12));

  const FramePair f = m.frame_at(ChartPoint(Vec{M_PI / 4.0, -0.3}));
  CHECK(f.h(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.h(1, 1) == doctest::Approx(std::sin(M_PI / 4.0)).epsilon(1e-12));
  CHECK(f.h(0, 1) == 0.0);
}

TEST_CASE("half-plane metric and frame") {
  const Manifold m(make_halfplane_source());
  const MetricJet jet = m.metric_at(ChartPoint(Vec{0.0, 2.0}));
  CHECK(jet.g(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(jet.g(1, 1) == doctest::Approx(0.25).epsilon(1e-14));
  const FramePair f = m.frame_at(ChartPoint(Vec{0.0, 2.0}));
  CHECK(f.h(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(f.h(1, 1) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("frame factorization invariants on random points") {
  Rng rng(42);
  for (const char* name : {"sphere", "halfplane"}) {
    const Manifold m = load_manifold(name);
    for (int i = 0; i < 30; ++i) {
      const Vec x = sample_point(m, 42, i);
      const MetricJet jet = m.metric_at(ChartPoint(x));
      const FramePair f = m.frame_at(ChartPoint(x));
      // h^T h = g to near machine precision, relative.
      const Mat gram = f.h.transposed().multiply(f.h);
      CHECK(norm_inf(gram - jet.g) < 1e-12 * (1.0 + norm_inf(jet.g)));
      CHECK(identity_distance(f.h.multiply(f.k)) < 1e-12);
      // det h > 0: triangular, so the diagonal tells.
      for (int d = 0; d < m.dim(); ++d) CHECK(f.h(d, d) > 0.0);
    }
  }
  (void)rng;
}

TEST_CASE("sphere Christoffel symbols at theta = pi/4") {
  const Manifold m(make_sphere_source());
  const Tensor3 gamma = m.christoffel_at(ChartPoint(Vec{M_PI / 4.0, 1.0})).gamma;
  // Gamma^theta_phiphi = -sin cos = -1/2, Gamma^phi_thetaphi = cot = 1.
  CHECK(gamma(0, 1, 1) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(gamma(1, 0, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gamma(1, 1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(gamma(0, 0, 0)) < 1e-14);
}

TEST_CASE("half-plane Christoffel symbols at (0, 1)") {
  const Manifold m(make_halfplane_source());
  const Tensor3 gamma = m.christoffel_at(ChartPoint(Vec{0.0, 1.0})).gamma;
  CHECK(gamma(0, 0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(gamma(0, 1, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(gamma(1, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gamma(1, 1, 1) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("christoffel derivative matches finite differences") {
  for (const char* name : {"sphere", "halfplane"}) {
    const Manifold m = load_manifold(name);
    for (int i = 0; i < 5; ++i) {
      const Vec x = sample_point(m, 9, i);
      const Christoffel c = m.christoffel_at(ChartPoint(x));
      const double h = 1e-5;
      for (int d = 0; d < 2; ++d) {
        Vec p = x, q = x;
        p[d] += h;
        q[d] -= h;
        const Tensor3 gp = m.christoffel_at(ChartPoint(p)).gamma;
        const Tensor3 gq = m.christoffel_at(ChartPoint(q)).gamma;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int e = 0; e < 2; ++e) {
              const double fd = (gp(a, b, e) - gq(a, b, e)) / (2.0 * h);
              CHECK(std::fabs(c.dgamma(a, b, e, d) - fd) < 1e-6);
            }
      }
    }
  }
}

TEST_CASE("half-plane vertical direction is geodesic for the frame connection") {
  const Manifold m(make_halfplane_source());
  const Tensor3 gamma = m.gamma_at(ChartPoint(Vec{0.0, 1.0}));
  const Vec e2{0.0, 1.0};
  CHECK(norm(gamma.apply(e2, e2)) < 1e-12);
}

TEST_CASE("frame connection antisymmetry on random points") {
  for (const char* name : {"sphere", "halfplane"}) {
    const Manifold m = load_manifold(name);
    for (int i = 0; i < 20; ++i) {
      const Vec x = sample_point(m, 3, i);
      const Tensor3 gamma = m.gamma_at(ChartPoint(x));
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c)
            CHECK(std::fabs(gamma(a, b, c) + gamma(c, b, a)) < 1e-9);
    }
  }
}

TEST_CASE("anholonomy equals antisymmetrized frame connection") {
  for (const char* name : {"sphere", "halfplane"}) {
    const Manifold m = load_manifold(name);
    for (int i = 0; i < 20; ++i) {
      const Vec x = sample_point(m, 4, i);
      const Tensor3 c = m.anholonomy_at(ChartPoint(x));
      const Tensor3 gamma = m.gamma_at(ChartPoint(x));
      for (int a = 0; a < 2; ++a)
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q) {
            CHECK(std::fabs(c(a, p, q) - (gamma(a, p, q) - gamma(a, q, p))) <
                  1e-9);
            CHECK(std::fabs(c(a, p, q) + c(a, q, p)) < 1e-12);
          }
    }
  }
}

TEST_CASE("sectional curvature: +1 on the sphere, -1 on the half-plane") {
  const Manifold sphere(make_sphere_source());
  const Manifold half(make_halfplane_source());
  const Vec e1{1.0, 0.0}, e2{0.0, 1.0};

  for (int i = 0; i < 50; ++i) {
    const Vec xs = sample_point(sphere, 5, i);
    const Tensor4 rs = sphere.riemann_classical_at(ChartPoint(xs));
    // |<e2, R<e1, e1, e2>>| = 1 for unit curvature.
    const double contraction = dot(e2, rs.apply(e1, e1, e2));
    CHECK(std::fabs(std::fabs(contraction) - 1.0) < 1e-9);
    // sectional curvature via <e1, R(e1,e2) e2>.
    const double k = dot(e1, rs.apply(e2, e1, e2));
    CHECK(k == doctest::Approx(1.0).epsilon(1e-9));

    const Vec xh = sample_point(half, 5, i);
    const Tensor4 rh = half.riemann_classical_at(ChartPoint(xh));
    const double kh = dot(e1, rh.apply(e2, e1, e2));
    CHECK(kh == doctest::Approx(-1.0).epsilon(1e-9));
  }
}

TEST_CASE("constant sectional curvature has tiny spread across points") {
  const Manifold sphere(make_sphere_source());
  double lo = 1e300, hi = -1e300;
  const Vec e1{1.0, 0.0}, e2{0.0, 1.0};
  for (int i = 0; i < 50; ++i) {
    const Vec x = sample_point(sphere, 6, i);
    const double k =
        dot(e1, sphere.riemann_classical_at(ChartPoint(x)).apply(e2, e1, e2));
    lo = std::min(lo, k);
    hi = std::max(hi, k);
  }
  CHECK(hi - lo < 1e-6);
}

TEST_CASE("curvature antisymmetry in the last two slots") {
  const Manifold m(make_sphere_source());
  const Tensor4 r = m.riemann_classical_at(ChartPoint(Vec{1.1, 0.2}));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          CHECK(std::fabs(r(a, b, c, d) + r(a, b, d, c)) < 1e-12);
}

TEST_CASE("domain enforcement") {
  const Manifold half(make_halfplane_source());
  CHECK_THROWS_AS(half.metric_at(ChartPoint(Vec{0.0, -1.0})), DomainError);
  CHECK_THROWS_AS(half.metric_at(ChartPoint(Vec{0.0, 0.0})), DomainError);
  const Manifold sphere(make_sphere_source());
  CHECK_THROWS_AS(sphere.metric_at(ChartPoint(Vec{0.01, 0.0})), DomainError);
  CHECK_THROWS_AS(sphere.metric_at(ChartPoint(Vec{1.0})), DomainError);
}

TEST_CASE("manifold resolution") {
  CHECK(load_manifold("euclidean3").dim() == 3);
  CHECK(load_manifold("sphere").name() == "sphere");
  CHECK_THROWS_AS(load_manifold("torus"), ConfigError);
  CHECK_THROWS_AS(load_manifold("euclidean0"), ConfigError);
}

TEST_CASE("non positive definite user metric is rejected at evaluation") {
  const Manifold bad = manifold_from_metric_text(
      "dim 2; coords a b; g[0][0] = 1; g[1][0] = 0; g[1][1] = a;", "bad");
  CHECK_THROWS_AS(bad.metric_at(ChartPoint(Vec{-0.5, 0.0})), DomainError);
  CHECK(bad.metric_at(ChartPoint(Vec{0.5, 0.0})).g(1, 1) == 0.5);
}
