#include "rgeom/group_dp.hpp"

#include <cmath>

#include "rgeom/errors.hpp"
#include "rgeom/rng.hpp"

namespace rgeom {

namespace {

Vec basis(int n, int i) {
  Vec v(n);
  v[i] = 1.0;
  return v;
}

double det2x2_sign(const Mat& r) {
  // Sign of the determinant via LU-free expansion for small n.
  const int n = r.rows();
  if (n == 1) return r(0, 0) >= 0 ? 1.0 : -1.0;
  if (n == 2) return (r(0, 0) * r(1, 1) - r(0, 1) * r(1, 0)) >= 0 ? 1.0 : -1.0;
  // General case: product of pivots.
  Mat a = r;
  double sign = 1.0;
  for (int col = 0; col < n; ++col) {
    int best = col;
    for (int i = col + 1; i < n; ++i)
      if (std::fabs(a(i, col)) > std::fabs(a(best, col))) best = i;
    if (a(best, col) == 0.0) return 0.0;
    if (best != col) {
      sign = -sign;
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(best, j));
    }
    sign = a(col, col) > 0 ? sign : -sign;
    for (int i = col + 1; i < n; ++i) {
      const double f = a(i, col) / a(col, col);
      for (int j = col; j < n; ++j) a(i, j) -= f * a(col, j);
    }
  }
  return sign;
}

}  // namespace

RotationOperator RotationOperator::checked(Mat r, double tol) {
  const Mat gram = r.transposed().multiply(r);
  if (identity_distance(gram) > tol)
    throw ConfigError("rotation operator is not orthogonal");
  if (det2x2_sign(r) <= 0.0)
    throw ConfigError("rotation operator reverses orientation");
  return {std::move(r)};
}

Mat pi_matrix(const Manifold& m, const ChartPoint& x, const FrameVector& t,
              const SolverConfig& cfg) {
  // Backward transport = transpose of the (orthogonal) forward transport.
  return integrate_transported(m, x, t, cfg).forward.transposed();
}

FrameVector pi_transport(const Manifold& m, const ChartPoint& x,
                         const FrameVector& t, const FrameVector& theta_prime,
                         const SolverConfig& cfg) {
  return FrameVector(pi_matrix(m, x, t, cfg).apply(theta_prime.components));
}

DPElement dp_multiply(const Manifold& m, const ChartPoint& x, const DPElement& a,
                      const DPElement& b, const SolverConfig& cfg) {
  const ChartPoint mid = exp_map(m, x, a.t, cfg);
  const FrameVector t_total = rt_multiply(m, x, a.t, b.t, cfg);
  const Mat pi_a = pi_matrix(m, x, a.t, cfg);
  const Mat pi_b = pi_matrix(m, mid, b.t, cfg);
  const Mat pi_total_inv = pi_matrix(m, x, t_total, cfg).transposed();
  DPElement out;
  out.t = t_total;
  out.r = a.r.multiply(pi_a).multiply(b.r).multiply(pi_b).multiply(pi_total_inv);
  return out;
}

FrameVector dp_act_tangent(const Manifold& m, const ChartPoint& x,
                           const DPElement& g, const FrameVector& tau_prime,
                           const SolverConfig& cfg) {
  const Vec transported = pi_matrix(m, x, g.t, cfg).apply(tau_prime.components);
  return FrameVector(g.r.apply(transported));
}

Mat dp_act_frame(const Manifold& m, const ChartPoint& x, const DPElement& g,
                 const SolverConfig& cfg) {
  const TransportedLeg leg = integrate_transported(m, x, g.t, cfg);
  const Mat k_end = m.frame_at(leg.end.point).k;
  // Columns: chart components at x' of the transported, r-rotated frame.
  return k_end.multiply(leg.forward).multiply(g.r.transposed());
}

SigmaOperator sigma_at(const Manifold& m, const ChartPoint& x,
                       const SolverConfig& cfg) {
  const int n = m.dim();
  const double eps = cfg.fd_eps;

  SigmaOperator out;
  out.second_order = group_second_order(m, x, cfg);
  out.translation = Tensor3(n);
  out.rotation = Tensor4(n);

  for (int a = 0; a < n; ++a)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        out.translation(a, p, q) =
            out.second_order(a, p, q) - out.second_order(a, q, p);

  // Rotation block: mixed second derivative of the rotation part of the
  // multiplication law for pure translations.
  auto rot_part = [&](const Vec& a, const Vec& b) -> Mat {
    const ChartPoint mid = exp_map(m, x, FrameVector(a), cfg);
    const Mat pa = pi_matrix(m, x, FrameVector(a), cfg);
    const Mat pb = pi_matrix(m, mid, FrameVector(b), cfg);
    const FrameVector total = rt_multiply(m, x, FrameVector(a), FrameVector(b), cfg);
    const Mat ptot_inv = pi_matrix(m, x, total, cfg).transposed();
    return pa.multiply(pb).multiply(ptot_inv);
  };
  auto mixed_r = [&](int p, int q, double e) -> Mat {
    const Vec lp = basis(n, p), lq = basis(n, q);
    Mat s = rot_part(lp * e, lq * e);
    s -= rot_part(lp * e, lq * -e);
    s -= rot_part(lp * -e, lq * e);
    s += rot_part(lp * -e, lq * -e);
    return s * (1.0 / (4.0 * e * e));
  };

  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      Mat d_pq = mixed_r(p, q, eps);
      Mat d_qp = mixed_r(q, p, eps);
      if (cfg.richardson) {
        d_pq = (4.0 * mixed_r(p, q, 0.5 * eps) - d_pq) * (1.0 / 3.0);
        d_qp = (4.0 * mixed_r(q, p, 0.5 * eps) - d_qp) * (1.0 / 3.0);
      }
      const Mat gen = d_pq - d_qp;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          out.rotation(a, b, p, q) = gen(a, b);
          out.rotation(a, b, q, p) = -gen(a, b);
        }
    }
  return out;
}

HolonomyResult holonomy_loop(const Manifold& m, const ChartPoint& x,
                             const FrameVector& a, const FrameVector& b,
                             double scale, const SolverConfig& cfg) {
  const auto scaled = [&](const Vec& v, double s) { return FrameVector(v * s); };

  const TransportedLeg l1 = integrate_transported(m, x, scaled(a.components, scale), cfg);
  const Vec b1 = l1.forward.apply(b.components);
  const TransportedLeg l2 =
      integrate_transported(m, l1.end.point, scaled(b1, scale), cfg);
  const Vec a2 = l2.forward.apply(l1.forward.apply(a.components));
  const TransportedLeg l3 =
      integrate_transported(m, l2.end.point, scaled(a2, -scale), cfg);
  const Vec b3 = l3.forward.apply(l2.forward.apply(b1));
  const TransportedLeg l4 =
      integrate_transported(m, l3.end.point, scaled(b3, -scale), cfg);

  HolonomyResult out;
  out.rotation =
      l4.forward.multiply(l3.forward).multiply(l2.forward).multiply(l1.forward);
  out.angle = rotation_angle(out.rotation);
  out.closure_defect = norm(l4.end.point.coords - x.coords);
  return out;
}

double first_integral_residual(const Manifold& m, const ChartPoint& x,
                               const FrameVector& t, const FrameVector& theta0,
                               int checkpoints, const SolverConfig& cfg) {
  if (checkpoints < 1) throw ConfigError("checkpoints must be positive");
  double worst = 0.0;
  for (int j = 1; j <= checkpoints; ++j) {
    const double frac = static_cast<double>(j) / checkpoints;
    const TransportedLeg leg =
        integrate_transported(m, x, FrameVector(t.components * frac), cfg);
    const Vec theta_j = leg.forward.apply(theta0.components);
    // Independent reconstruction of the transport back to x.
    const FrameVector t_back = log_map(m, x, leg.end.point, cfg);
    const Mat pi_back = pi_matrix(m, x, t_back, cfg);
    const Vec u = pi_back.apply(theta_j);
    worst = std::max(worst, norm(u - theta0.components));
  }
  return worst;
}

ConsistencyResult consistency_residual(const Manifold& m, const ChartPoint& x,
                                       const SolverConfig& cfg, double s_eps) {
  const int n = m.dim();
  const Tensor3 gamma = m.gamma_at(x);
  ConsistencyResult out{0.0, 0.0};
  for (int p = 0; p < n; ++p) {
    const Vec tau = basis(n, p);
    for (int q = 0; q < n; ++q) {
      const Vec theta = basis(n, q);
      auto d_of = [&](auto&& transport) -> Vec {
        const Vec plus = transport(s_eps);
        const Vec minus = transport(-s_eps);
        return (plus - minus) * (1.0 / (2.0 * s_eps));
      };
      const Vec d_pi = d_of([&](double s) {
        return pi_transport(m, x, FrameVector(tau * s), FrameVector(theta), cfg)
            .components;
      });
      const Vec d_lambda = d_of([&](double s) {
        return lambda_transport(m, x, FrameVector(tau * s), FrameVector(theta), cfg)
            .components;
      });
      const Vec expected = gamma.apply(tau, theta);
      out.pi_vs_lambda = std::max(out.pi_vs_lambda, norm_inf(d_pi - d_lambda));
      out.vs_connection =
          std::max({out.vs_connection, norm_inf(d_pi - expected),
                    norm_inf(d_lambda - expected)});
    }
  }
  return out;
}

double rotation_angle(const Mat& r) {
  const int n = r.rows();
  if (n == 1) return 0.0;
  if (n == 2) return std::atan2(r(1, 0) - r(0, 1), r(0, 0) + r(1, 1));
  double trace = 0.0;
  for (int i = 0; i < n; ++i) trace += r(i, i);
  const double c = std::clamp((trace - (n - 2)) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

Mat random_rotation(int n, Rng& rng) {
  Mat r = Mat::identity(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double angle = rng.uniform(-M_PI, M_PI);
      const double c = std::cos(angle), s = std::sin(angle);
      // Apply a plane rotation in coordinates (i, j).
      for (int col = 0; col < n; ++col) {
        const double vi = r(i, col), vj = r(j, col);
        r(i, col) = c * vi - s * vj;
        r(j, col) = s * vi + c * vj;
      }
    }
  return r;
}

}  // namespace rgeom
