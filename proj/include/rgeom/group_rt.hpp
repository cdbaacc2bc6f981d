#pragma once

#include "rgeom/geodesic.hpp"
#include "rgeom/manifold.hpp"

namespace rgeom {

/// Group element of the deformed translation group: parameter t attached
/// to base point x. The action moves x to exp_map(x, t).
struct RTElement {
  ChartPoint base;
  FrameVector parameter;
};

/// Element-level wrappers over the (base, parameter) calls below.
ChartPoint rt_act(const Manifold& m, const RTElement& g,
                  const SolverConfig& cfg);
RTElement rt_compose(const Manifold& m, const RTElement& g,
                     const FrameVector& t_prime, const SolverConfig& cfg);

/// Multiplication law phi_x(t, t') = H_x(K_x(t) + K_x'(t')): compose the
/// leg t from x with the leg t' from x' = exp_map(x, t) and express the
/// result as a single parameter at x. t' is read at x'.
FrameVector rt_multiply(const Manifold& m, const ChartPoint& x,
                        const FrameVector& t, const FrameVector& t_prime,
                        const SolverConfig& cfg);

/// Action on the chart: x' = f_x(t) (alias of exp_map).
ChartPoint rt_act(const Manifold& m, const ChartPoint& x,
                  const FrameVector& t, const SolverConfig& cfg);

/// Inverse parameter: the element at x' = exp_map(x, t) that maps back to
/// x, i.e. log_map(x', x). rt_multiply(x, t, inverse) vanishes.
FrameVector rt_inverse(const Manifold& m, const ChartPoint& x,
                       const FrameVector& t, const SolverConfig& cfg);

/// lambda_x(t)<theta'>: derivative of the multiplication law in its second
/// slot — the finite lambda-transport of theta' (at x') back to x.
/// Central differences with one Richardson level when cfg.richardson.
FrameVector lambda_transport(const Manifold& m, const ChartPoint& x,
                             const FrameVector& t, const FrameVector& theta_prime,
                             const SolverConfig& cfg);

/// lambda as a matrix (columns = transported basis vectors).
Mat lambda_matrix(const Manifold& m, const ChartPoint& x, const FrameVector& t,
                  const SolverConfig& cfg);

/// mu_x(t)<l>: derivative of the multiplication law in its first slot at 0.
FrameVector mu_map(const Manifold& m, const ChartPoint& x, const FrameVector& t,
                   const FrameVector& l, const SolverConfig& cfg);

Mat mu_matrix(const Manifold& m, const ChartPoint& x, const FrameVector& t,
              const SolverConfig& cfg);

/// Mixed second derivative of the multiplication law at the origin:
/// out(a, p, q) = d_t d_t' phi^a(0,0) along (e_p, e_q). Equals the frame
/// connection; its antisymmetric part is the structure operator.
Tensor3 group_second_order(const Manifold& m, const ChartPoint& x,
                           const SolverConfig& cfg);

/// rho = d_t d2_t' phi(0,0): the third-order expansion operator of the
/// multiplication law. Slot order: apply(l, u, v) with symmetry in (u, v).
Tensor4 rho_at(const Manifold& m, const ChartPoint& x, const SolverConfig& cfg);

/// Curvature operator assembled from rho by antisymmetrization; same slot
/// convention as Manifold::riemann_classical_at, so the two agree directly.
Tensor4 curvature_from_group(const Manifold& m, const ChartPoint& x,
                             const SolverConfig& cfg);

/// Gram form of the lambda-transport: G(t) = lambda(t)^T lambda(t).
Mat lambda_gram(const Manifold& m, const ChartPoint& x, const FrameVector& t,
                const SolverConfig& cfg);

}  // namespace rgeom
