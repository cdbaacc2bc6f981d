#include "rgeom/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rgeom/errors.hpp"

namespace rgeom {

void SolverConfig::validate() const {
  if (steps_per_unit < 1) throw ConfigError("steps_per_unit must be positive");
  if (bvp_max_iter < 1) throw ConfigError("bvp_max_iter must be positive");
  if (!(bvp_tol > 0.0)) throw ConfigError("bvp_tol must be positive");
  if (!(fd_eps >= 1e-6 && fd_eps <= 1e-2))
    throw ConfigError("fd_eps must lie in [1e-6, 1e-2]");
}

namespace {

struct State {
  Vec x;
  Vec v;
};

State geodesic_rhs(const Manifold& m, const State& s) {
  const Tensor3 gamma = m.christoffel_fast(s.x);
  State d;
  d.x = s.v;
  d.v = -gamma.apply(s.v, s.v);
  return d;
}

State axpy(const State& s, double a, const State& d) {
  State out;
  out.x = s.x + a * d.x;
  out.v = s.v + a * d.v;
  return out;
}

void check_state(const State& s) {
  if (!s.x.finite() || !s.v.finite())
    throw SolverError("geodesic integration produced a non-finite state");
}

State rk4_step(const Manifold& m, const State& s, double h) {
  const State k1 = geodesic_rhs(m, s);
  const State k2 = geodesic_rhs(m, axpy(s, 0.5 * h, k1));
  const State k3 = geodesic_rhs(m, axpy(s, 0.5 * h, k2));
  const State k4 = geodesic_rhs(m, axpy(s, h, k3));
  State out = s;
  for (int i = 0; i < s.x.size(); ++i) {
    out.x[i] += h / 6.0 * (k1.x[i] + 2.0 * (k2.x[i] + k3.x[i]) + k4.x[i]);
    out.v[i] += h / 6.0 * (k1.v[i] + 2.0 * (k2.v[i] + k3.v[i]) + k4.v[i]);
  }
  check_state(out);
  return out;
}

int step_count(const SolverConfig& cfg, double s) {
  const double len = std::fabs(s);
  return std::max(1, static_cast<int>(std::ceil(cfg.steps_per_unit * len)));
}

State integrate(const Manifold& m, State s0, double s, const SolverConfig& cfg,
                GeodesicPath* path) {
  const int n_steps = step_count(cfg, s);
  const double h = s / n_steps;
  if (path) {
    path->params.clear();
    path->points.clear();
    path->velocities.clear();
    path->params.push_back(0.0);
    path->points.push_back(s0.x);
    path->velocities.push_back(s0.v);
  }
  State cur = s0;
  for (int i = 0; i < n_steps; ++i) {
    cur = rk4_step(m, cur, h);
    m.require_inside(ChartPoint(cur.x));
    if (path) {
      path->params.push_back(h * (i + 1));
      path->points.push_back(cur.x);
      path->velocities.push_back(cur.v);
    }
  }
  return cur;
}

}  // namespace

GeodesicPath geodesic_ivp(const Manifold& m, const ChartPoint& x,
                          const ChartVector& v0, double s,
                          const SolverConfig& cfg) {
  cfg.validate();
  m.require_inside(x);
  GeodesicPath path;
  path.base = x;
  path.initial_velocity = v0;
  State st{x.coords, v0.components};
  if (s == 0.0) {
    path.params = {0.0};
    path.points = {x.coords};
    path.velocities = {v0.components};
    return path;
  }
  integrate(m, st, s, cfg, &path);
  return path;
}

GeodesicEnd exp_map_full(const Manifold& m, const ChartPoint& x,
                         const FrameVector& t, const SolverConfig& cfg) {
  cfg.validate();
  m.require_inside(x);
  const double s = t.norm();
  if (s == 0.0) {
    GeodesicEnd end;
    end.point = x;
    end.velocity = ChartVector(Vec(m.dim()));
    end.tangent = FrameVector(Vec(m.dim()));
    return end;
  }
  Mat k0;
  m.frame_basic(x.coords, nullptr, &k0);
  const Vec tau = t.components * (1.0 / s);
  State st{x.coords, k0.apply(tau)};
  const State out = integrate(m, st, s, cfg, nullptr);
  GeodesicEnd end;
  end.point = ChartPoint(out.x);
  end.velocity = ChartVector(out.v);
  Mat h_end;
  m.frame_basic(end.point.coords, &h_end, nullptr);
  end.tangent = FrameVector(h_end.apply(end.velocity.components));
  return end;
}

ChartPoint exp_map(const Manifold& m, const ChartPoint& x,
                   const FrameVector& t, const SolverConfig& cfg) {
  return exp_map_full(m, x, t, cfg).point;
}

FrameVector log_map(const Manifold& m, const ChartPoint& x,
                    const ChartPoint& target, const SolverConfig& cfg) {
  cfg.validate();
  m.require_inside(x);
  m.require_inside(target);
  const int n = m.dim();

  Vec delta = target.coords - x.coords;
  if (norm_inf(delta) == 0.0) return FrameVector(Vec(n));

  Mat h0;
  m.frame_basic(x.coords, &h0, nullptr);
  Vec t = h0.apply(delta);  // initial shooting guess

  auto miss = [&](const Vec& param) -> Vec {
    return exp_map(m, x, FrameVector(param), cfg).coords - target.coords;
  };

  const double floor = 64.0 * 2.2e-16 * (1.0 + norm_inf(target.coords));
  const double tol = std::max(cfg.bvp_tol, floor);
  const double jac_step = 1e-6;

  auto jacobian = [&](const Vec& at) {
    Mat jac(n, n);
    for (int j = 0; j < n; ++j) {
      Vec tp = at, tm = at;
      tp[j] += jac_step;
      tm[j] -= jac_step;
      const Vec rp = miss(tp);
      const Vec rm = miss(tm);
      for (int i = 0; i < n; ++i) jac(i, j) = (rp[i] - rm[i]) / (2.0 * jac_step);
    }
    return jac;
  };

  Vec r = miss(t);
  // The initial guess is exact on flat charts; skip the iteration (and its
  // polish) entirely once the miss sits at the arithmetic floor.
  if (norm_inf(r) < 0.25 * floor) return FrameVector(t);
  Mat jac;
  bool converged = false;
  for (int iter = 0; iter < cfg.bvp_max_iter && !converged; ++iter) {
    if (norm_inf(r) < tol) {
      converged = true;
      break;
    }
    jac = jacobian(t);
    Vec step = solve(jac, -1.0 * r);
    double alpha = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 12; ++halving) {
      const Vec trial = t + alpha * step;
      Vec r_trial;
      try {
        r_trial = miss(trial);
      } catch (const Error&) {
        alpha *= 0.5;  // trial leg left the chart; shorten
        continue;
      }
      if (norm(r_trial) < norm(r)) {
        t = trial;
        r = r_trial;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted)
      throw SolverError(
          "log_map shooting stalled; target may be outside the injectivity "
          "radius");
  }
  if (!converged && norm_inf(r) >= tol)
    throw SolverError(
        "log_map did not converge; target may be outside the injectivity "
        "radius");

  // Two undamped polish steps with the last Jacobian drive the miss to the
  // arithmetic floor and keep the solver output a smooth function of its
  // inputs, which the finite-difference expansions downstream rely on.
  if (jac.rows() != n) jac = jacobian(t);
  for (int polish = 0; polish < 2; ++polish) {
    const Vec step = solve(jac, -1.0 * r);
    const Vec trial = t + step;
    Vec r_trial;
    try {
      r_trial = miss(trial);
    } catch (const Error&) {
      break;
    }
    if (norm(r_trial) <= norm(r)) {
      t = trial;
      r = r_trial;
    }
  }
  return FrameVector(t);
}

double geodesic_distance(const Manifold& m, const ChartPoint& x,
                         const ChartPoint& target, const SolverConfig& cfg) {
  return log_map(m, x, target, cfg).norm();
}

double canonicity_residual(const Manifold& m, const ChartPoint& x,
                           const FrameVector& tau, double s, double s_prime,
                           const SolverConfig& cfg) {
  const GeodesicEnd leg = exp_map_full(m, x, FrameVector(tau.components * s), cfg);
  const FrameVector second(leg.tangent.components * s_prime);
  const ChartPoint far = exp_map(m, leg.point, second, cfg);
  const FrameVector composed = log_map(m, x, far, cfg);
  return norm(composed.components - (s + s_prime) * tau.components);
}

double cauchy_residual(const Manifold& m, const ChartPoint& x,
                       const ChartPoint& target, const ChartVector& v,
                       const SolverConfig& cfg, double eps) {
  if (!(eps > 0.0)) throw ConfigError("cauchy eps must be positive");
  auto logf = [&](const Vec& y) -> Vec {
    return log_map(m, x, ChartPoint(y), cfg).components;
  };
  const Vec y0 = target.coords;
  const Vec dir = v.components;
  const Vec d2 = (logf(y0 + eps * dir) - 2.0 * logf(y0) + logf(y0 - eps * dir)) *
                 (1.0 / (eps * eps));
  const Tensor3 gamma = m.christoffel_fast(y0);
  const Vec w = gamma.apply(dir, dir);
  const Vec d1 = (logf(y0 + eps * w) - logf(y0 - eps * w)) * (1.0 / (2.0 * eps));
  return norm(d2 - d1);
}

TransportedLeg integrate_transported(const Manifold& m, const ChartPoint& x,
                                     const FrameVector& t,
                                     const SolverConfig& cfg) {
  cfg.validate();
  m.require_inside(x);
  const int n = m.dim();
  const double s = t.norm();
  if (s == 0.0) {
    TransportedLeg leg;
    leg.end.point = x;
    leg.end.velocity = ChartVector(Vec(n));
    leg.end.tangent = FrameVector(Vec(n));
    leg.forward = Mat::identity(n);
    return leg;
  }
  const FramePair f0 = m.frame_at(x);
  const Vec tau = t.components * (1.0 / s);

  // Joint state: chart point, chart velocity, transport matrix F with
  // dF = -gamma_frame<tau, .> F ds.
  struct Joint {
    Vec x;
    Vec v;
    Mat F;
  };
  auto rhs = [&](const Joint& j) -> Joint {
    Tensor3 gamma_chart;
    Mat h;
    Tensor3 gamma_frame;
    m.connection_fast(j.x, &gamma_chart, &h, nullptr, &gamma_frame);
    Joint d;
    d.x = j.v;
    d.v = -gamma_chart.apply(j.v, j.v);
    const Vec tau_now = h.apply(j.v);
    d.F = Mat(n, n);
    for (int col = 0; col < n; ++col) {
      Vec theta(n);
      for (int i = 0; i < n; ++i) theta[i] = j.F(i, col);
      const Vec dtheta = -1.0 * gamma_frame.apply(tau_now, theta);
      for (int i = 0; i < n; ++i) d.F(i, col) = dtheta[i];
    }
    return d;
  };
  auto jaxpy = [&](const Joint& j, double a, const Joint& d) -> Joint {
    Joint out;
    out.x = j.x + a * d.x;
    out.v = j.v + a * d.v;
    out.F = j.F + a * d.F;
    return out;
  };

  Joint cur{x.coords, f0.k.apply(tau), Mat::identity(n)};
  const int n_steps = step_count(cfg, s);
  const double h = s / n_steps;
  for (int i = 0; i < n_steps; ++i) {
    const Joint k1 = rhs(cur);
    const Joint k2 = rhs(jaxpy(cur, 0.5 * h, k1));
    const Joint k3 = rhs(jaxpy(cur, 0.5 * h, k2));
    const Joint k4 = rhs(jaxpy(cur, h, k3));
    Joint next = cur;
    for (int c = 0; c < n; ++c) {
      next.x[c] += h / 6.0 * (k1.x[c] + 2.0 * (k2.x[c] + k3.x[c]) + k4.x[c]);
      next.v[c] += h / 6.0 * (k1.v[c] + 2.0 * (k2.v[c] + k3.v[c]) + k4.v[c]);
    }
    next.F += (h / 6.0) * (k1.F + 2.0 * (k2.F + k3.F) + k4.F);
    if (!next.x.finite() || !next.v.finite())
      throw SolverError("transport integration produced a non-finite state");
    m.require_inside(ChartPoint(next.x));
    cur = next;
  }

  TransportedLeg leg;
  leg.end.point = ChartPoint(cur.x);
  leg.end.velocity = ChartVector(cur.v);
  leg.end.tangent = to_frame(m.frame_at(leg.end.point).h, leg.end.velocity);
  leg.forward = cur.F;
  return leg;
}

}  // namespace rgeom
