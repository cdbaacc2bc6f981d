#include "rgeom/group_rt.hpp"

#include <cmath>
#include <functional>

namespace rgeom {

namespace {

Vec basis(int n, int i) {
  Vec v(n);
  v[i] = 1.0;
  return v;
}

/// Central first derivative with optional one-level Richardson
/// extrapolation: D(eps) has O(eps^2) error, the combination
/// (4 D(eps/2) - D(eps)) / 3 has O(eps^4).
Vec central1(const std::function<Vec(double)>& f, double eps, bool richardson) {
  auto d = [&](double e) -> Vec { return (f(e) - f(-e)) * (1.0 / (2.0 * e)); };
  const Vec coarse = d(eps);
  if (!richardson) return coarse;
  const Vec fine = d(0.5 * eps);
  return (4.0 * fine - coarse) * (1.0 / 3.0);
}

/// Central second derivative through a precomputed center value.
Vec central2(const std::function<Vec(double)>& f, const Vec& center, double eps,
             bool richardson) {
  auto d = [&](double e) -> Vec {
    return (f(e) - 2.0 * center + f(-e)) * (1.0 / (e * e));
  };
  const Vec coarse = d(eps);
  if (!richardson) return coarse;
  const Vec fine = d(0.5 * eps);
  return (4.0 * fine - coarse) * (1.0 / 3.0);
}

}  // namespace

FrameVector rt_multiply(const Manifold& m, const ChartPoint& x,
                        const FrameVector& t, const FrameVector& t_prime,
                        const SolverConfig& cfg) {
  const ChartPoint mid = exp_map(m, x, t, cfg);
  const ChartPoint far = exp_map(m, mid, t_prime, cfg);
  return log_map(m, x, far, cfg);
}

ChartPoint rt_act(const Manifold& m, const RTElement& g,
                  const SolverConfig& cfg) {
  return exp_map(m, g.base, g.parameter, cfg);
}

RTElement rt_compose(const Manifold& m, const RTElement& g,
                     const FrameVector& t_prime, const SolverConfig& cfg) {
  return RTElement{g.base, rt_multiply(m, g.base, g.parameter, t_prime, cfg)};
}

ChartPoint rt_act(const Manifold& m, const ChartPoint& x, const FrameVector& t,
                  const SolverConfig& cfg) {
  return exp_map(m, x, t, cfg);
}

FrameVector rt_inverse(const Manifold& m, const ChartPoint& x,
                       const FrameVector& t, const SolverConfig& cfg) {
  const ChartPoint mid = exp_map(m, x, t, cfg);
  return log_map(m, mid, x, cfg);
}

FrameVector lambda_transport(const Manifold& m, const ChartPoint& x,
                             const FrameVector& t, const FrameVector& theta_prime,
                             const SolverConfig& cfg) {
  const ChartPoint mid = exp_map(m, x, t, cfg);
  auto f = [&](double e) -> Vec {
    const ChartPoint moved =
        exp_map(m, mid, FrameVector(theta_prime.components * e), cfg);
    return log_map(m, x, moved, cfg).components;
  };
  return FrameVector(central1(f, cfg.fd_eps, cfg.richardson));
}

Mat lambda_matrix(const Manifold& m, const ChartPoint& x, const FrameVector& t,
                  const SolverConfig& cfg) {
  const int n = m.dim();
  Mat out(n, n);
  for (int j = 0; j < n; ++j) {
    const Vec col =
        lambda_transport(m, x, t, FrameVector(basis(n, j)), cfg).components;
    for (int i = 0; i < n; ++i) out(i, j) = col[i];
  }
  return out;
}

FrameVector mu_map(const Manifold& m, const ChartPoint& x, const FrameVector& t,
                   const FrameVector& l, const SolverConfig& cfg) {
  auto f = [&](double e) -> Vec {
    const ChartPoint mid = exp_map(m, x, FrameVector(l.components * e), cfg);
    const ChartPoint far = exp_map(m, mid, t, cfg);
    return log_map(m, x, far, cfg).components;
  };
  return FrameVector(central1(f, cfg.fd_eps, cfg.richardson));
}

Mat mu_matrix(const Manifold& m, const ChartPoint& x, const FrameVector& t,
              const SolverConfig& cfg) {
  const int n = m.dim();
  Mat out(n, n);
  for (int j = 0; j < n; ++j) {
    const Vec col = mu_map(m, x, t, FrameVector(basis(n, j)), cfg).components;
    for (int i = 0; i < n; ++i) out(i, j) = col[i];
  }
  return out;
}

Tensor3 group_second_order(const Manifold& m, const ChartPoint& x,
                           const SolverConfig& cfg) {
  const int n = m.dim();
  auto phi = [&](const Vec& a, const Vec& b) -> Vec {
    return rt_multiply(m, x, FrameVector(a), FrameVector(b), cfg).components;
  };
  auto mixed = [&](int p, int q, double e) -> Vec {
    const Vec lp = basis(n, p), lq = basis(n, q);
    return (phi(lp * e, lq * e) - phi(lp * e, lq * -e) - phi(lp * -e, lq * e) +
            phi(lp * -e, lq * -e)) *
           (1.0 / (4.0 * e * e));
  };
  Tensor3 out(n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      Vec d = mixed(p, q, cfg.fd_eps);
      if (cfg.richardson)
        d = (4.0 * mixed(p, q, 0.5 * cfg.fd_eps) - d) * (1.0 / 3.0);
      for (int a = 0; a < n; ++a) out(a, p, q) = d[a];
    }
  return out;
}

Tensor4 rho_at(const Manifold& m, const ChartPoint& x, const SolverConfig& cfg) {
  const int n = m.dim();
  const double delta = cfg.fd_eps;

  // mu(t')<l> for fixed l, as a function of t'. The two base legs
  // exp(x, +-eps l) are shared across every t' probe.
  auto mu_of = [&](const Vec& l) {
    const double eps = cfg.fd_eps;
    struct Legs {
      ChartPoint plus, minus, plus_half, minus_half;
    };
    auto legs = std::make_shared<Legs>();
    legs->plus = exp_map(m, x, FrameVector(l * eps), cfg);
    legs->minus = exp_map(m, x, FrameVector(l * -eps), cfg);
    legs->plus_half = exp_map(m, x, FrameVector(l * (0.5 * eps)), cfg);
    legs->minus_half = exp_map(m, x, FrameVector(l * (-0.5 * eps)), cfg);
    return [&, legs, eps](const Vec& t_prime) -> Vec {
      auto phi = [&](const ChartPoint& mid) -> Vec {
        return log_map(m, x, exp_map(m, mid, FrameVector(t_prime), cfg), cfg)
            .components;
      };
      const Vec coarse =
          (phi(legs->plus) - phi(legs->minus)) * (1.0 / (2.0 * eps));
      if (!cfg.richardson) return coarse;
      const Vec fine =
          (phi(legs->plus_half) - phi(legs->minus_half)) * (1.0 / eps);
      return (4.0 * fine - coarse) * (1.0 / 3.0);
    };
  };

  // Probe directions: basis vectors plus pair sums for polarization.
  std::vector<Vec> probes;
  for (int i = 0; i < n; ++i) probes.push_back(basis(n, i));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) probes.push_back(basis(n, i) + basis(n, j));

  Tensor4 rho(n);
  for (int li = 0; li < n; ++li) {
    auto mu = mu_of(basis(n, li));
    const Vec center = mu(Vec(n));

    // Second differences rho<l, u, u> for each probe u.
    std::vector<Vec> diag;
    diag.reserve(probes.size());
    for (const Vec& u : probes) {
      auto f = [&](double e) -> Vec { return mu(u * e); };
      diag.push_back(central2(f, center, delta, cfg.richardson));
    }
    // Fill the symmetric pair slots by polarization.
    for (int i = 0; i < n; ++i)
      for (int a = 0; a < n; ++a) rho(a, li, i, i) = diag[static_cast<size_t>(i)][a];
    int probe_idx = n;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const Vec mixed =
            0.5 * (diag[static_cast<size_t>(probe_idx)] -
                   diag[static_cast<size_t>(i)] - diag[static_cast<size_t>(j)]);
        for (int a = 0; a < n; ++a) {
          rho(a, li, i, j) = mixed[a];
          rho(a, li, j, i) = mixed[a];
        }
        ++probe_idx;
      }
  }
  return rho;
}

Tensor4 curvature_from_group(const Manifold& m, const ChartPoint& x,
                             const SolverConfig& cfg) {
  const Tensor4 rho = rho_at(m, x, cfg);
  const int n = m.dim();
  Tensor4 r(n);
  // R<t, A, B> = rho<B, A, t> - rho<A, B, t>
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          r(a, j, k, l) = rho(a, l, k, j) - rho(a, k, l, j);
  return r;
}

Mat lambda_gram(const Manifold& m, const ChartPoint& x, const FrameVector& t,
                const SolverConfig& cfg) {
  const Mat lam = lambda_matrix(m, x, t, cfg);
  return lam.transposed().multiply(lam);
}

}  // namespace rgeom
