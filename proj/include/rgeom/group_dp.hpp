#pragma once

#include "rgeom/geodesic.hpp"
#include "rgeom/group_rt.hpp"
#include "rgeom/manifold.hpp"

namespace rgeom {

/// Orthogonal, orientation-preserving operator on the model space T.
struct RotationOperator {
  Mat r;

  /// Validates r^T r = 1 (within tol) and det r > 0.
  static RotationOperator checked(Mat r, double tol = 1e-12);
  static RotationOperator identity(int n) { return {Mat::identity(n)}; }
};

/// Group element (t, r): translation parameter plus gauge rotation.
struct DPElement {
  FrameVector t;
  Mat r;
};

/// pi_x(t): finite parallel transport from x' = exp_map(x, t) back to x,
/// as a matrix on frame components. Orthogonal up to integrator error.
Mat pi_matrix(const Manifold& m, const ChartPoint& x, const FrameVector& t,
              const SolverConfig& cfg);

/// pi_x(t)<theta'> for a single vector given at x'.
FrameVector pi_transport(const Manifold& m, const ChartPoint& x,
                         const FrameVector& t, const FrameVector& theta_prime,
                         const SolverConfig& cfg);

/// Semidirect multiplication: translations compose through the RT law,
/// rotations through r'' = r pi_x(t) r' pi_x'(t') pi_x(t'')^-1.
DPElement dp_multiply(const Manifold& m, const ChartPoint& x, const DPElement& a,
                      const DPElement& b, const SolverConfig& cfg);

/// Action on tangent vectors at x': tau = r< pi_x(t) <tau'> >.
FrameVector dp_act_tangent(const Manifold& m, const ChartPoint& x,
                           const DPElement& g, const FrameVector& tau_prime,
                           const SolverConfig& cfg);

/// Moved frame at x' = exp_map(x, t): chart components of the transported
/// (and r-rotated) frame vectors, one column per frame index.
Mat dp_act_frame(const Manifold& m, const ChartPoint& x, const DPElement& g,
                 const SolverConfig& cfg);

/// Structure operator of the motion group, from antisymmetrized mixed
/// second differences of the multiplication law.
struct SigmaOperator {
  /// Full mixed second derivative of the translation block (not yet
  /// antisymmetrized): second_order(a, p, q) = d_t d_t' phi^a along
  /// (e_p, e_q). Its antisymmetric part is the translation block below.
  Tensor3 second_order;
  /// Translation block: antisymmetrized, expected to equal the
  /// anholonomy operator C.
  Tensor3 translation;
  /// Rotation block: rotation(a, b, p, q) is the (a, b) entry of the
  /// generator produced by the direction pair (e_p, e_q); expected to
  /// equal the curvature operator.
  Tensor4 rotation;
};

SigmaOperator sigma_at(const Manifold& m, const ChartPoint& x,
                       const SolverConfig& cfg);

/// Parallel transport around a geodesic quadrilateral with side directions
/// a and b (frame vectors at x), each leg of length scale.
struct HolonomyResult {
  Mat rotation;           // net forward transport around the loop
  double angle;           // rotation angle (2D: signed, else principal)
  double closure_defect;  // chart distance between start and end point
};

HolonomyResult holonomy_loop(const Manifold& m, const ChartPoint& x,
                             const FrameVector& a, const FrameVector& b,
                             double scale, const SolverConfig& cfg);

/// max_j | pi_x(log_map(x, x_j)) theta_j - theta_0 | over checkpoints
/// along the geodesic with parameter t, where theta evolves by the
/// transport equation. The transport operator is rebuilt at every
/// checkpoint from a fresh log_map solve.
double first_integral_residual(const Manifold& m, const ChartPoint& x,
                               const FrameVector& t, const FrameVector& theta0,
                               int checkpoints, const SolverConfig& cfg);

/// Infinitesimal comparison of the two transports.
struct ConsistencyResult {
  double pi_vs_lambda;   // max | d/ds pi - d/ds lambda | over basis pairs
  double vs_connection;  // max deviation of either derivative from gamma<tau, .>
};

ConsistencyResult consistency_residual(const Manifold& m, const ChartPoint& x,
                                       const SolverConfig& cfg,
                                       double s_eps = 1e-3);

/// Rotation angle of a near-rotation matrix (exact for n = 2).
double rotation_angle(const Mat& r);

/// Deterministic random rotation built from composed plane rotations.
Mat random_rotation(int n, class Rng& rng);

}  // namespace rgeom
