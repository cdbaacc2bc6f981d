#include <doctest.h>

#include <cmath>

#include "rgeom/builtins.hpp"
#include "rgeom/group_dp.hpp"
#include "rgeom/group_rt.hpp"
#include "rgeom/rng.hpp"
#include "rgeom/suite.hpp"

using namespace rgeom;

namespace {
const SolverConfig kCfg;
const Vec kE1{1.0, 0.0};
const Vec kE2{0.0, 1.0};
}  // namespace

TEST_CASE("rotation operator validation") {
  CHECK_NOTHROW(RotationOperator::checked(Mat::identity(3)));
  Mat reflect = Mat::identity(2);
  reflect(1, 1) = -1.0;
  CHECK_THROWS_AS(RotationOperator::checked(reflect), ConfigError);
  Mat skew = Mat::identity(2);
  skew(0, 1) = 0.25;
  CHECK_THROWS_AS(RotationOperator::checked(skew), ConfigError);
  Rng rng(2);
  CHECK_NOTHROW(RotationOperator::checked(random_rotation(3, rng), 1e-12));
}

TEST_CASE("pi transport: euclidean identity, orthogonality everywhere") {
  const Manifold e2(make_euclidean_source(2));
  const Vec theta{0.4, -1.1};
  CHECK(norm(pi_transport(e2, ChartPoint(Vec{0.0, 0.0}),
                          FrameVector(Vec{0.7, 0.3}), FrameVector(theta), kCfg)
                 .components -
             theta) < 1e-12);

  for (const char* name : {"sphere", "halfplane"}) {
    const Manifold m = load_manifold(name);
    for (int trial = 0; trial < 5; ++trial) {
      const ChartPoint x(sample_point(m, 41, trial));
      const Vec dir = Rng::stream(41, trial, 1).direction(2, 0.8);
      const Mat pi = pi_matrix(m, x, FrameVector(dir), kCfg);
      CHECK(identity_distance(pi.transposed().multiply(pi)) < 1e-9);
    }
  }
}

TEST_CASE("pi transport agrees with lambda transport on tangents") {
  for (const char* name : {"sphere", "halfplane"}) {
    const Manifold m = load_manifold(name);
    const ChartPoint x(sample_point(m, 42, 0));
    const Vec tau = Rng::stream(42, 0, 2).unit(2);
    const double s = 0.7;
    const GeodesicEnd leg = exp_map_full(m, x, FrameVector(tau * s), kCfg);
    const Vec a =
        pi_transport(m, x, FrameVector(tau * s), leg.tangent, kCfg).components;
    const Vec b =
        lambda_transport(m, x, FrameVector(tau * s), leg.tangent, kCfg).components;
    CHECK(norm(a - b) < 1e-6);
  }
}

TEST_CASE("parallel transport along the equator holds frame components") {
  const Manifold m(make_sphere_source());
  const ChartPoint x(Vec{M_PI / 2.0, 0.0});
  // Quarter equator: the (theta, phi) frame is parallel along this leg.
  const Mat pi = pi_matrix(m, x, FrameVector(kE2 * (M_PI / 2.0)), kCfg);
  CHECK(identity_distance(pi) < 1e-9);
}

TEST_CASE("dp unit laws and euclidean reduction") {
  const Manifold m(make_euclidean_source(2));
  const ChartPoint x(Vec{0.5, 0.5});
  Rng rng(5);
  const Mat r1 = random_rotation(2, rng);
  const Mat r2 = random_rotation(2, rng);
  const DPElement a{FrameVector(Vec{0.3, -0.2}), r1};
  const DPElement b{FrameVector(Vec{-0.1, 0.4}), r2};
  const DPElement prod = dp_multiply(m, x, a, b, kCfg);
  CHECK(norm(prod.t.components - Vec{0.2, 0.2}) < 1e-9);
  CHECK(norm_inf(prod.r - r1.multiply(r2)) < 1e-9);

  const DPElement id{FrameVector(Vec(2)), Mat::identity(2)};
  const DPElement left = dp_multiply(m, x, id, a, kCfg);
  CHECK(norm(left.t.components - a.t.components) < 1e-9);
  CHECK(norm_inf(left.r - a.r) < 1e-9);
}

TEST_CASE("pure translations along one geodesic compose with no rotation") {
  for (const char* name : {"sphere", "halfplane"}) {
    const Manifold m = load_manifold(name);
    const ChartPoint x(sample_point(m, 43, 1));
    const Vec tau = Rng::stream(43, 1, 3).unit(2);
    const double s = 0.4, sp = 0.3;
    const GeodesicEnd leg = exp_map_full(m, x, FrameVector(tau * s), kCfg);
    const DPElement a{FrameVector(tau * s), Mat::identity(2)};
    const DPElement b{FrameVector(leg.tangent.components * sp), Mat::identity(2)};
    const DPElement prod = dp_multiply(m, x, a, b, kCfg);
    CHECK(norm(prod.t.components - (s + sp) * tau) < 1e-6);
    CHECK(identity_distance(prod.r) < 1e-6);
  }
}

TEST_CASE("dp associativity with rotations") {
  for (const char* name : {"sphere", "halfplane"}) {
    const Manifold m = load_manifold(name);
    const ChartPoint x(sample_point(m, 44, 2));
    Rng rng = Rng::stream(44, 2, 4);
    const Vec t1 = rng.direction(2, 0.25);
    const ChartPoint x1 = exp_map(m, x, FrameVector(t1), kCfg);
    const Vec t2 = rng.direction(2, 0.25);
    const Vec t3 = rng.direction(2, 0.25);
    const DPElement a{FrameVector(t1), random_rotation(2, rng)};
    const DPElement b{FrameVector(t2), random_rotation(2, rng)};
    const DPElement c{FrameVector(t3), random_rotation(2, rng)};
    const DPElement lhs = dp_multiply(m, x, dp_multiply(m, x, a, b, kCfg), c, kCfg);
    const DPElement rhs = dp_multiply(m, x, a, dp_multiply(m, x1, b, c, kCfg), kCfg);
    CHECK(norm(lhs.t.components - rhs.t.components) < 1e-5);
    CHECK(norm_inf(lhs.r - rhs.r) < 1e-5);
  }
}

TEST_CASE("tangent action preserves norms and angles") {
  for (const char* name : {"sphere", "halfplane"}) {
    const Manifold m = load_manifold(name);
    Rng rng = Rng::stream(45, 3, 5);
    for (int trial = 0; trial < 30; ++trial) {
      const ChartPoint x(sample_point(m, 45, trial % 8));
      const DPElement g{FrameVector(rng.direction(2, rng.uniform(0.1, 0.6))),
                        random_rotation(2, rng)};
      const Vec a = rng.direction(2, rng.uniform(0.5, 2.0));
      const Vec b = rng.direction(2, rng.uniform(0.5, 2.0));
      const Vec ga = dp_act_tangent(m, x, g, FrameVector(a), kCfg).components;
      const Vec gb = dp_act_tangent(m, x, g, FrameVector(b), kCfg).components;
      CHECK(std::fabs(dot(ga, gb) - dot(a, b)) < 1e-9);
      CHECK(std::fabs(norm(ga) - norm(a)) < 1e-9);
    }
  }
}

TEST_CASE("identity element acts trivially on tangents") {
  const Manifold m(make_sphere_source());
  const ChartPoint x(Vec{1.4, 0.0});
  const DPElement id{FrameVector(Vec(2)), Mat::identity(2)};
  const Vec theta{0.6, -0.2};
  CHECK(norm(dp_act_tangent(m, x, id, FrameVector(theta), kCfg).components -
             theta) < 1e-12);
}

TEST_CASE("moving frame: trivial motion and flat translation keep the frame") {
  const Manifold e2(make_euclidean_source(2));
  const ChartPoint x(Vec{0.2, 0.8});
  const DPElement id{FrameVector(Vec(2)), Mat::identity(2)};
  const Mat frame0 = dp_act_frame(e2, x, id, kCfg);
  CHECK(norm_inf(frame0 - e2.frame_at(x).k) < 1e-12);

  const DPElement shift{FrameVector(Vec{0.5, -0.1}), Mat::identity(2)};
  const Mat moved = dp_act_frame(e2, x, shift, kCfg);
  CHECK(norm_inf(moved - Mat::identity(2)) < 1e-10);
}

TEST_CASE("connection recovered from the moving-frame limit") {
  const Manifold m(make_halfplane_source());
  const ChartPoint x(Vec{0.0, 1.0});
  const Tensor3 gamma = m.gamma_at(x);
  const double h = 1e-3;
  for (int p = 0; p < 2; ++p) {
    const Vec tau = p == 0 ? kE1 : kE2;
    auto frame_comps = [&](double s) -> Mat {
      const DPElement g{FrameVector(tau * s), Mat::identity(2)};
      const ChartPoint end = exp_map(m, x, g.t, kCfg);
      return m.frame_at(end).h.multiply(dp_act_frame(m, x, g, kCfg));
    };
    const Mat diff = (frame_comps(h) - frame_comps(-h)) * (-1.0 / (2.0 * h));
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        CHECK(std::fabs(diff(a, b) - gamma(a, p, b)) < 1e-5);
  }
}

TEST_CASE("sigma blocks: zero on flat space") {
  const Manifold e2(make_euclidean_source(2));
  const SigmaOperator sig = sigma_at(e2, ChartPoint(Vec{0.1, 0.1}), kCfg);
  CHECK(norm_inf(sig.translation) < 1e-9);
  CHECK(norm_inf(sig.rotation) < 1e-8);
}

TEST_CASE("sigma blocks reproduce anholonomy and curvature") {
  for (const char* name : {"sphere", "halfplane"}) {
    const Manifold m = load_manifold(name);
    const ChartPoint x(sample_point(m, 46, 4));
    const SigmaOperator sig = sigma_at(m, x, kCfg);

    Tensor3 dt = sig.translation;
    dt -= m.anholonomy_at(x);
    CHECK(norm_inf(dt) < 5e-3);

    const Tensor4 r = m.riemann_classical_at(x);
    double worst = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q)
            worst = std::max(worst,
                             std::fabs(sig.rotation(a, b, p, q) - r(a, b, p, q)));
    CHECK(worst < 5e-3);

    // Sectional curvature read from the rotation block.
    const double sectional = sig.rotation(0, 1, 0, 1);
    if (std::string(name) == "sphere")
      CHECK(std::fabs(sectional - 1.0) < 5e-3);
    else
      CHECK(std::fabs(sectional + 1.0) < 5e-3);
  }
}

TEST_CASE("holonomy: identity on flat space") {
  const Manifold e2(make_euclidean_source(2));
  const HolonomyResult hol = holonomy_loop(e2, ChartPoint(Vec{0.0, 0.0}),
                                           FrameVector(kE1), FrameVector(kE2),
                                           0.4, kCfg);
  CHECK(std::fabs(hol.angle) < 1e-12);
  CHECK(identity_distance(hol.rotation) < 1e-12);
  CHECK(hol.closure_defect < 1e-12);
}

TEST_CASE("holonomy of a small square matches curvature times area") {
  const Manifold sphere(make_sphere_source());
  const ChartPoint x(Vec{1.5, 0.3});
  const HolonomyResult hol = holonomy_loop(sphere, x, FrameVector(kE1),
                                           FrameVector(kE2), 0.1, kCfg);
  CHECK(std::fabs(hol.angle) == doctest::Approx(0.01).epsilon(0.1));

  const HolonomyResult half = holonomy_loop(sphere, x, FrameVector(kE1),
                                            FrameVector(kE2), 0.05, kCfg);
  CHECK(std::fabs(hol.angle / half.angle) == doctest::Approx(4.0).epsilon(0.05));

  const Manifold hp(make_halfplane_source());
  const HolonomyResult hol_hp = holonomy_loop(hp, ChartPoint(Vec{0.0, 1.0}),
                                              FrameVector(kE1), FrameVector(kE2),
                                              0.1, kCfg);
  CHECK(std::fabs(hol_hp.angle) == doctest::Approx(0.01).epsilon(0.12));
}

TEST_CASE("first integrals of the geodesic flow") {
  const Manifold e2(make_euclidean_source(2));
  CHECK(first_integral_residual(e2, ChartPoint(Vec{0.0, 0.0}),
                                FrameVector(Vec{0.4, 0.3}),
                                FrameVector(Vec{1.0, -0.5}), 4, kCfg) < 1e-12);

  const Manifold hp(make_halfplane_source());
  CHECK(first_integral_residual(hp, ChartPoint(Vec{0.0, 1.0}),
                                FrameVector(kE2), FrameVector(Vec{0.8, 0.3}), 4,
                                kCfg) < 1e-7);

  const Manifold sphere(make_sphere_source());
  CHECK(first_integral_residual(sphere, ChartPoint(Vec{M_PI / 2.0, 0.0}),
                                FrameVector(kE2), FrameVector(kE1), 4,
                                kCfg) < 1e-6);
}

TEST_CASE("infinitesimal transport consistency") {
  const Manifold e2(make_euclidean_source(2));
  const ConsistencyResult flat =
      consistency_residual(e2, ChartPoint(Vec{0.3, 0.3}), kCfg);
  CHECK(flat.pi_vs_lambda < 1e-9);
  CHECK(flat.vs_connection < 1e-9);

  for (const char* name : {"sphere", "halfplane"}) {
    const Manifold m = load_manifold(name);
    const ConsistencyResult r =
        consistency_residual(m, ChartPoint(sample_point(m, 47, 5)), kCfg);
    CHECK(r.pi_vs_lambda < 1e-5);
    CHECK(r.vs_connection < 1e-5);
  }
}

TEST_CASE("consistency is strictly infinitesimal: finite transports differ") {
  const Manifold m(make_sphere_source());
  const ChartPoint x(Vec{M_PI / 2.0, 0.0});
  const Vec theta = kE1;  // transverse to the equator tangent
  const Vec a =
      lambda_transport(m, x, FrameVector(kE2), FrameVector(theta), kCfg).components;
  const Vec b =
      pi_transport(m, x, FrameVector(kE2), FrameVector(theta), kCfg).components;
  CHECK(norm(a - b) > 1e-4);
}

TEST_CASE("composition of tangent-bundle action maps") {
  const Manifold m(make_halfplane_source());
  const ChartPoint x(sample_point(m, 48, 6));
  Rng rng = Rng::stream(48, 6, 7);
  const Vec t1 = rng.direction(2, 0.3);
  const ChartPoint x1 = exp_map(m, x, FrameVector(t1), kCfg);
  const Vec t2 = rng.direction(2, 0.3);
  const DPElement a{FrameVector(t1), random_rotation(2, rng)};
  const DPElement b{FrameVector(t2), random_rotation(2, rng)};
  const DPElement prod = dp_multiply(m, x, a, b, kCfg);
  const Mat lhs = prod.r.multiply(pi_matrix(m, x, prod.t, kCfg));
  const Mat rhs = a.r.multiply(pi_matrix(m, x, a.t, kCfg))
                      .multiply(b.r)
                      .multiply(pi_matrix(m, x1, b.t, kCfg));
  CHECK(norm_inf(lhs - rhs) < 1e-5);
}
