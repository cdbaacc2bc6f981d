#pragma once

#include <vector>

#include "rgeom/manifold.hpp"

namespace rgeom {

/// Solver knobs shared by the geodesic engine and the group-law
/// finite-difference extractions.
struct SolverConfig {
  int steps_per_unit = 256;   // fixed RK4 steps per unit affine parameter
  int bvp_max_iter = 64;      // shooting iterations
  double bvp_tol = 1e-12;     // endpoint tolerance, chart units
  double fd_eps = 1e-2;       // step for group-law expansion derivatives
  bool richardson = true;     // one extrapolation level on those derivatives

  void validate() const;
};

/// Sampled geodesic in the affine parameterization.
struct GeodesicPath {
  ChartPoint base;
  ChartVector initial_velocity;
  std::vector<double> params;
  std::vector<Vec> points;
  std::vector<Vec> velocities;
};

/// Endpoint data of a geodesic leg.
struct GeodesicEnd {
  ChartPoint point;
  ChartVector velocity;      // chart components of x-dot at the endpoint
  FrameVector tangent;       // frame components of x-dot at the endpoint
};

/// Integrate x-ddot + Gamma<x-dot, x-dot> = 0 from x with initial chart
/// velocity v0 over affine parameter s (s may be negative).
GeodesicPath geodesic_ivp(const Manifold& m, const ChartPoint& x,
                          const ChartVector& v0, double s,
                          const SolverConfig& cfg);

/// Geodesic exponential: follow the geodesic with initial frame vector t
/// for affine length |t|. exp_map(x, 0) = x.
ChartPoint exp_map(const Manifold& m, const ChartPoint& x,
                   const FrameVector& t, const SolverConfig& cfg);

/// exp_map plus endpoint velocity/tangent (the transported unit scale).
GeodesicEnd exp_map_full(const Manifold& m, const ChartPoint& x,
                         const FrameVector& t, const SolverConfig& cfg);

/// Geodesic logarithm by damped-Newton shooting: returns t with
/// exp_map(x, t) = target. |t| is the geodesic arc length. Throws
/// SolverError when the iteration does not converge (target outside the
/// reachable/injective region).
FrameVector log_map(const Manifold& m, const ChartPoint& x,
                    const ChartPoint& target, const SolverConfig& cfg);

/// Geodesic distance |log_map|.
double geodesic_distance(const Manifold& m, const ChartPoint& x,
                         const ChartPoint& target, const SolverConfig& cfg);

/// || phi_x(s tau, s' tau_x') - (s+s') tau ||: deviation from affine
/// additivity along one geodesic; near zero exactly when the deformation
/// is canonical.
double canonicity_residual(const Manifold& m, const ChartPoint& x,
                           const FrameVector& tau, double s, double s_prime,
                           const SolverConfig& cfg);

/// Residual of the log-map Cauchy problem
/// (d2_x' H - d_x' H o Gamma_x')<v,v> evaluated by central differences
/// with chart step eps.
double cauchy_residual(const Manifold& m, const ChartPoint& x,
                       const ChartPoint& target, const ChartVector& v,
                       const SolverConfig& cfg, double eps = 1e-3);

/// Endpoint plus the parallel-transport operator along the leg: `forward`
/// maps frame components at x to frame components at the endpoint.
struct TransportedLeg {
  GeodesicEnd end;
  Mat forward;
};

/// Integrate the geodesic together with the frame parallel-transport
/// system d theta = -gamma<tau, theta> ds.
TransportedLeg integrate_transported(const Manifold& m, const ChartPoint& x,
                                     const FrameVector& t,
                                     const SolverConfig& cfg);

}  // namespace rgeom
