#pragma once

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "rgeom/linalg.hpp"

namespace rgeom {

/// Point expressed in chart coordinates x.
struct ChartPoint {
  Vec coords;
  ChartPoint() = default;
  explicit ChartPoint(Vec c) : coords(std::move(c)) {}
  int dim() const { return coords.size(); }
};

/// Tangent vector in the coordinate basis (components of x-dot).
struct ChartVector {
  Vec components;
  ChartVector() = default;
  explicit ChartVector(Vec c) : components(std::move(c)) {}
  int dim() const { return components.size(); }
};

/// Tangent vector in the orthonormal frame; lengths and angles are read
/// with the identity form eta on these components.
struct FrameVector {
  Vec components;
  FrameVector() = default;
  explicit FrameVector(Vec c) : components(std::move(c)) {}
  int dim() const { return components.size(); }
  double norm() const { return rgeom::norm(components); }
};

/// Open coordinate box; +-infinity bounds mean "unbounded".
struct DomainBox {
  Vec lo;
  Vec hi;

  static DomainBox unbounded(int n) {
    DomainBox b;
    b.lo = Vec(n);
    b.hi = Vec(n);
    for (int i = 0; i < n; ++i) {
      b.lo[i] = -std::numeric_limits<double>::infinity();
      b.hi[i] = std::numeric_limits<double>::infinity();
    }
    return b;
  }

  bool contains(const Vec& x) const {
    for (int i = 0; i < x.size(); ++i)
      if (!(x[i] > lo[i] && x[i] < hi[i])) return false;
    return true;
  }
};

/// Metric value with its first and second coordinate derivatives:
/// g(i,j), dg(i,j,k) = d_k g_ij, d2g(i,j,k,l) = d_k d_l g_ij.
struct MetricJet {
  Mat g;
  Tensor3 dg;
  Tensor4 d2g;
};

/// Supplier of the metric field on a chart. Implementations must return
/// exact (analytic) derivatives; finite differences are not acceptable
/// at the tolerances the identity suite runs at.
class MetricSource {
 public:
  virtual ~MetricSource() = default;
  virtual int dim() const = 0;
  virtual const DomainBox& domain() const = 0;
  virtual const std::string& name() const = 0;
  virtual MetricJet eval(const Vec& x) const = 0;
};

/// Frame data at a point: tau = h * tau_tilde maps coordinate components
/// to frame components, k = h^-1 maps back, dk(i,j,a) = d_a k_ij.
struct FramePair {
  Mat h;
  Mat k;
  Tensor3 dh;
  Tensor3 dk;
};

/// Christoffel symbols Gamma(i,j,k) = Gamma^i_jk and their derivatives
/// dGamma(i,j,k,l) = d_l Gamma^i_jk.
struct Christoffel {
  Tensor3 gamma;
  Tensor4 dgamma;
};

/// Everything the solvers need at one point, computed in a single pass.
struct PointGeometry {
  Vec x;
  Mat g;
  Mat g_inv;
  Tensor3 dg;
  Tensor4 d2g;
  FramePair frame;
  Christoffel conn;
  Tensor3 gamma_frame;     // gamma(a,b,c): frame connection, slots <dir, vec>
  Tensor3 anholonomy;      // C(a,b,c), antisymmetric in (b,c)
  Tensor4 riemann_coord;   // R(i,j,k,l) = R^i_jkl, pair slots (k,l)
  Tensor4 riemann_frame;   // same tensor pushed to frame indices
};

/// Immutable chart-plus-metric bundle. All queries are pure; concurrent
/// evaluation at any points is safe.
class Manifold {
 public:
  explicit Manifold(std::shared_ptr<const MetricSource> source);

  int dim() const { return source_->dim(); }
  const std::string& name() const { return source_->name(); }
  const DomainBox& domain() const { return source_->domain(); }
  const MetricSource& source() const { return *source_; }

  bool contains(const ChartPoint& x) const;
  void require_inside(const ChartPoint& x) const;

  MetricJet metric_at(const ChartPoint& x) const;
  FramePair frame_at(const ChartPoint& x) const;
  Christoffel christoffel_at(const ChartPoint& x) const;
  /// Frame connection gamma<l,l'> = h(Gamma(kl,kl') + ((kl) . dk)(l')).
  Tensor3 gamma_at(const ChartPoint& x) const;
  /// Structure operator C<l,l'>: antisymmetrized frame derivative of k.
  Tensor3 anholonomy_at(const ChartPoint& x) const;
  /// Curvature in frame indices: slot order R(a; t, pair1, pair2) so that
  /// the trilinear map <t,l,l'> contracts as riemann.apply(t, l, l').
  Tensor4 riemann_classical_at(const ChartPoint& x) const;

  PointGeometry geometry_at(const ChartPoint& x) const;

  /// Light-weight path for ODE right-hand sides: metric + Christoffel only.
  Tensor3 christoffel_fast(const Vec& x) const;
  /// Frame matrices without their derivatives (hot solver path).
  void frame_basic(const Vec& x, Mat* h, Mat* k) const;
  /// Metric + Christoffel + frame connection, for transport equations.
  void connection_fast(const Vec& x, Tensor3* gamma_chart, Mat* h, Mat* k,
                       Tensor3* gamma_frame) const;

 private:
  std::shared_ptr<const MetricSource> source_;
};

/// Convenience conversions.
FrameVector to_frame(const Mat& h, const ChartVector& v);
ChartVector to_chart(const Mat& k, const FrameVector& v);

}  // namespace rgeom
