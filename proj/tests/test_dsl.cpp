#include <doctest.h>

#include <cmath>

#include "rgeom/builtins.hpp"
#include "rgeom/metric_dsl.hpp"
#include "rgeom/rng.hpp"

using namespace rgeom;

namespace {

const char* kHalfplaneText =
    "dim 2; coords x y; domain x (-inf,inf) y (0,inf);"
    " g[0][0] = 1/(y*y); g[1][0] = 0; g[1][1] = 1/(y*y);";

const char* kSphereText =
    "dim 2; coords theta phi; domain theta (0.05, 3.09) phi (-inf,inf);"
    " g[0][0] = 1; g[1][0] = 0; g[1][1] = sin(theta)^2;";

}  // namespace

TEST_CASE("parse half-plane definition") {
  const MetricSpec spec = parse_metric(kHalfplaneText);
  CHECK(spec.dim() == 2);
  CHECK(spec.coords()[0] == "x");
  CHECK(spec.coords()[1] == "y");
  CHECK(spec.domain().lo[1] == 0.0);
  CHECK(std::isinf(spec.domain().hi[1]));

  const MetricJet at = spec.eval(Vec{0.0, 2.0});
  CHECK(at.g(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(at.g(1, 1) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(at.g(0, 1) == 0.0);
  CHECK(at.dg(0, 0, 1) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(at.d2g(0, 0, 1, 1) == doctest::Approx(0.375).epsilon(1e-14));
}

TEST_CASE("one-dimensional euclidean definition") {
  const MetricSpec spec = parse_metric("dim 1; coords u; domain u (-inf,inf); g[0][0] = 1;");
  const MetricJet at = spec.eval(Vec{3.7});
  CHECK(at.g(0, 0) == 1.0);
  CHECK(at.dg(0, 0, 0) == 0.0);
}

TEST_CASE("missing entries are reported by name") {
  try {
    parse_metric("dim 2; coords a b; g[0][0] = 1;");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("g[1][0]") != std::string::npos);
    CHECK(msg.find("g[1][1]") != std::string::npos);
  }
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_metric("dim 2;\ncoords a b;\ng[0][0] = 1 + ;");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() > 0);
  }
}

TEST_CASE("rejected inputs") {
  CHECK_THROWS_AS(parse_metric("coords a; dim 1; g[0][0]=1;"), ParseError);
  CHECK_THROWS_AS(parse_metric("dim 2; coords a; g[0][0]=1;"), ParseError);
  CHECK_THROWS_AS(parse_metric("dim 1; coords u; g[0][0] = v;"), ParseError);
  CHECK_THROWS_AS(parse_metric("dim 2; coords a b; g[0][1] = 1; g[0][0]=1; g[1][1]=1;"),
                  ParseError);
  CHECK_THROWS_AS(parse_metric("dim 1; coords u; g[0][0] = u^1.5;"), ParseError);
  CHECK_THROWS_AS(parse_metric("dim 1; coords u; g[0][0]=1; g[0][0]=2;"),
                  ParseError);
  CHECK_THROWS_AS(parse_metric("dim 1; coords sin; g[0][0]=1;"), ParseError);
}

TEST_CASE("comments and whitespace are ignored") {
  const MetricSpec spec = parse_metric(
      "# a comment line\n"
      "dim 1;   coords u;\n"
      "g[0][0] = 2 # trailing comment\n + 3;\n");
  CHECK(spec.eval(Vec{0.0}).g(0, 0) == 5.0);
}

TEST_CASE("round-trip: parse, print, parse yields an identical tree") {
  const char* texts[] = {
      kHalfplaneText,
      kSphereText,
      "dim 2; coords a b; g[0][0] = -a^2 + 3*(b - 1)/(2 + cosh(a)); g[1][0] = "
      "a*b; g[1][1] = exp(-b)*sqrt(1 + a^2) - sinh(a)/(1 + b^2);",
      "dim 1; coords u; g[0][0] = 2 - -u - 3 - u*pi;",
      "dim 1; coords u; g[0][0] = (1 + u)^-2 + ln(2 + sin(u));",
  };
  for (const char* text : texts) {
    const MetricSpec first = parse_metric(text);
    const std::string printed = first.pretty_print();
    CAPTURE(printed);
    const MetricSpec second = parse_metric(printed);
    REQUIRE(first.dim() == second.dim());
    for (int i = 0; i < first.dim(); ++i)
      for (int j = 0; j <= i; ++j)
        CHECK(first.entry(i, j).equals(second.entry(i, j)));
    CHECK(second.pretty_print() == printed);
  }
}

TEST_CASE("jet evaluation matches finite differences on random points") {
  const MetricSpec spec = parse_metric(
      "dim 2; coords a b; g[0][0] = exp(a)/(2 + sin(b)); g[1][0] = a*b/4; "
      "g[1][1] = 1 + (a - b)^2;");
  Rng rng(123);
  for (int trial = 0; trial < 25; ++trial) {
    Vec x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const MetricJet jet = spec.eval(x);
    const double h = 1e-5;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j <= i; ++j) {
        for (int k = 0; k < 2; ++k) {
          Vec p = x, m = x;
          p[k] += h;
          m[k] -= h;
          const double fd =
              (spec.eval(p).g(i, j) - spec.eval(m).g(i, j)) / (2.0 * h);
          CHECK(std::fabs(jet.dg(i, j, k) - fd) < 1e-6);
          for (int l = 0; l < 2; ++l) {
            Vec pp = x, pm = x, mp = x, mm = x;
            pp[k] += h; pp[l] += h;
            pm[k] += h; pm[l] -= h;
            mp[k] -= h; mp[l] += h;
            mm[k] -= h; mm[l] -= h;
            const double fd2 = (spec.eval(pp).g(i, j) - spec.eval(pm).g(i, j) -
                                spec.eval(mp).g(i, j) + spec.eval(mm).g(i, j)) /
                               (4.0 * h * h);
            CHECK(std::fabs(jet.d2g(i, j, k, l) - fd2) < 1e-5);
          }
        }
      }
  }
}

TEST_CASE("DSL half-plane and sphere match built-in evaluators") {
  const Manifold dsl_half = manifold_from_metric_text(kHalfplaneText, "halfplane.metric");
  const Manifold half(make_halfplane_source());
  const Manifold dsl_sphere = manifold_from_metric_text(kSphereText, "sphere.metric");
  const Manifold sphere(make_sphere_source());

  Rng rng(77);
  for (int i = 0; i < 100; ++i) {
    const Vec xh{rng.uniform(-2.0, 2.0), rng.uniform(0.2, 4.0)};
    const MetricJet a = dsl_half.metric_at(ChartPoint(xh));
    const MetricJet b = half.metric_at(ChartPoint(xh));
    CHECK(norm_inf(a.g - b.g) < 1e-12);
    Tensor3 dg_diff = a.dg;
    dg_diff -= b.dg;
    CHECK(norm_inf(dg_diff) < 1e-12);
    Tensor4 d2g_diff = a.d2g;
    d2g_diff -= b.d2g;
    CHECK(norm_inf(d2g_diff) < 1e-12);

    const Vec xs{rng.uniform(0.3, 2.8), rng.uniform(-3.0, 3.0)};
    const MetricJet c = dsl_sphere.metric_at(ChartPoint(xs));
    const MetricJet d = sphere.metric_at(ChartPoint(xs));
    CHECK(norm_inf(c.g - d.g) < 1e-12);
    Tensor3 ds_diff = c.dg;
    ds_diff -= d.dg;
    CHECK(norm_inf(ds_diff) < 1e-12);
    Tensor4 d2s_diff = c.d2g;
    d2s_diff -= d.d2g;
    CHECK(norm_inf(d2s_diff) < 1e-12);
  }
}
