#include "rgeom/manifold.hpp"

#include <cmath>
#include <sstream>

#include "rgeom/errors.hpp"

namespace rgeom {

namespace {

void check_finite(const MetricJet& m, const Vec& x) {
  for (int i = 0; i < m.g.rows(); ++i)
    for (int j = 0; j < m.g.cols(); ++j)
      if (!std::isfinite(m.g(i, j))) {
        std::ostringstream os;
        os << "metric evaluated to a non-finite value at (";
        for (int k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
        os << ")";
        throw DomainError(os.str());
      }
}

FramePair build_frame(const MetricJet& m) {
  const int n = m.g.rows();
  const Mat L = cholesky_lower(m.g);
  FramePair f;
  f.h = L.transposed();
  f.k = invert_lower_triangular(L).transposed();
  f.dh = Tensor3(n);
  f.dk = Tensor3(n);
  for (int a = 0; a < n; ++a) {
    Mat dg_a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) dg_a(i, j) = m.dg(i, j, a);
    const Mat dL = cholesky_lower_differential(L, dg_a);
    const Mat dh = dL.transposed();
    const Mat dk = f.k.multiply(dh).multiply(f.k) * -1.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        f.dh(i, j, a) = dh(i, j);
        f.dk(i, j, a) = dk(i, j);
      }
  }
  return f;
}

Christoffel build_christoffel(const MetricJet& m, const Mat& g_inv) {
  const int n = m.g.rows();
  Christoffel c;
  c.gamma = Tensor3(n);
  c.dgamma = Tensor4(n);

  // Gamma^i_jk = 1/2 g^il (d_j g_lk + d_k g_lj - d_l g_jk)
  Tensor3 bracket(n);  // bracket(l,j,k)
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        bracket(l, j, k) =
            0.5 * (m.dg(l, k, j) + m.dg(l, j, k) - m.dg(j, k, l));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += g_inv(i, l) * bracket(l, j, k);
        c.gamma(i, j, k) = s;
      }

  // d_m g^il = -g^ia (d_m g_ab) g^bl
  Tensor3 dg_inv(n);
  for (int mI = 0; mI < n; ++mI)
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            s -= g_inv(i, a) * m.dg(a, b, mI) * g_inv(b, l);
        dg_inv(i, l, mI) = s;
      }

  for (int mI = 0; mI < n; ++mI)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) {
            const double dbracket =
                0.5 * (m.d2g(l, k, j, mI) + m.d2g(l, j, k, mI) -
                       m.d2g(j, k, l, mI));
            s += dg_inv(i, l, mI) * bracket(l, j, k) + g_inv(i, l) * dbracket;
          }
          c.dgamma(i, j, k, mI) = s;
        }
  return c;
}

Tensor3 build_gamma_frame(const FramePair& f, const Tensor3& christoffel) {
  const int n = f.h.rows();
  Tensor3 out(n);
  for (int b = 0; b < n; ++b) {
    Vec kb(n);
    for (int i = 0; i < n; ++i) kb[i] = f.k(i, b);
    for (int c = 0; c < n; ++c) {
      Vec kc(n);
      for (int i = 0; i < n; ++i) kc[i] = f.k(i, c);
      Vec chart(n);
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) s += christoffel(i, j, k) * kb[j] * kc[k];
        for (int mI = 0; mI < n; ++mI) s += kb[mI] * f.dk(i, c, mI);
        chart[i] = s;
      }
      const Vec frame = f.h.apply(chart);
      for (int a = 0; a < n; ++a) out(a, b, c) = frame[a];
    }
  }
  return out;
}

Tensor3 build_anholonomy(const FramePair& f) {
  const int n = f.h.rows();
  Tensor3 out(n);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      Vec chart(n);
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int mI = 0; mI < n; ++mI)
          s += f.k(mI, b) * f.dk(i, c, mI) - f.k(mI, c) * f.dk(i, b, mI);
        chart[i] = s;
      }
      const Vec frame = f.h.apply(chart);
      for (int a = 0; a < n; ++a) out(a, b, c) = frame[a];
    }
  return out;
}

Tensor4 build_riemann_coord(const Christoffel& c) {
  const int n = c.gamma.dim();
  Tensor4 out(n);
  // R^i_jkl = d_k Gamma^i_lj - d_l Gamma^i_kj
  //         + Gamma^i_ka Gamma^a_lj - Gamma^i_la Gamma^a_kj
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double s = c.dgamma(i, l, j, k) - c.dgamma(i, k, j, l);
          for (int a = 0; a < n; ++a)
            s += c.gamma(i, k, a) * c.gamma(a, l, j) -
                 c.gamma(i, l, a) * c.gamma(a, k, j);
          out(i, j, k, l) = s;
        }
  return out;
}

Tensor4 push_to_frame(const Tensor4& r, const Mat& h, const Mat& k) {
  const int n = h.rows();
  Tensor4 out(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double s = 0.0;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              for (int kk = 0; kk < n; ++kk)
                for (int l = 0; l < n; ++l)
                  s += h(a, i) * r(i, j, kk, l) * k(j, b) * k(kk, c) * k(l, d);
          out(a, b, c, d) = s;
        }
  return out;
}

}  // namespace

Manifold::Manifold(std::shared_ptr<const MetricSource> source)
    : source_(std::move(source)) {
  if (!source_) throw ConfigError("null metric source");
}

bool Manifold::contains(const ChartPoint& x) const {
  return x.dim() == dim() && domain().contains(x.coords);
}

void Manifold::require_inside(const ChartPoint& x) const {
  if (x.dim() != dim()) {
    std::ostringstream os;
    os << "point dimension " << x.dim() << " does not match chart dimension "
       << dim();
    throw DomainError(os.str());
  }
  if (!domain().contains(x.coords)) {
    std::ostringstream os;
    os << "point (";
    for (int i = 0; i < x.dim(); ++i) os << (i ? ", " : "") << x.coords[i];
    os << ") is outside the chart domain of " << name();
    throw DomainError(os.str());
  }
}

MetricJet Manifold::metric_at(const ChartPoint& x) const {
  require_inside(x);
  MetricJet m = source_->eval(x.coords);
  check_finite(m, x.coords);
  cholesky_lower(m.g);  // positive-definiteness gate
  return m;
}

FramePair Manifold::frame_at(const ChartPoint& x) const {
  return build_frame(metric_at(x));
}

Christoffel Manifold::christoffel_at(const ChartPoint& x) const {
  const MetricJet m = metric_at(x);
  return build_christoffel(m, invert_spd(m.g));
}

Tensor3 Manifold::gamma_at(const ChartPoint& x) const {
  const MetricJet m = metric_at(x);
  const FramePair f = build_frame(m);
  const Christoffel c = build_christoffel(m, invert_spd(m.g));
  return build_gamma_frame(f, c.gamma);
}

Tensor3 Manifold::anholonomy_at(const ChartPoint& x) const {
  return build_anholonomy(frame_at(x));
}

Tensor4 Manifold::riemann_classical_at(const ChartPoint& x) const {
  const MetricJet m = metric_at(x);
  const FramePair f = build_frame(m);
  const Christoffel c = build_christoffel(m, invert_spd(m.g));
  return push_to_frame(build_riemann_coord(c), f.h, f.k);
}

PointGeometry Manifold::geometry_at(const ChartPoint& x) const {
  const MetricJet m = metric_at(x);
  PointGeometry p;
  p.x = x.coords;
  p.g = m.g;
  p.g_inv = invert_spd(m.g);
  p.dg = m.dg;
  p.d2g = m.d2g;
  p.frame = build_frame(m);
  p.conn = build_christoffel(m, p.g_inv);
  p.gamma_frame = build_gamma_frame(p.frame, p.conn.gamma);
  p.anholonomy = build_anholonomy(p.frame);
  p.riemann_coord = build_riemann_coord(p.conn);
  p.riemann_frame = push_to_frame(p.riemann_coord, p.frame.h, p.frame.k);
  return p;
}

Tensor3 Manifold::christoffel_fast(const Vec& x) const {
  ChartPoint p(x);
  require_inside(p);
  MetricJet m = source_->eval(x);
  check_finite(m, x);
  const int n = dim();
  const Mat g_inv = invert_spd(m.g);
  Tensor3 out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += 0.5 * g_inv(i, l) *
               (m.dg(l, k, j) + m.dg(l, j, k) - m.dg(j, k, l));
        out(i, j, k) = s;
      }
  return out;
}

void Manifold::frame_basic(const Vec& x, Mat* h, Mat* k) const {
  ChartPoint p(x);
  require_inside(p);
  MetricJet m = source_->eval(x);
  check_finite(m, x);
  const Mat L = cholesky_lower(m.g);
  if (h) *h = L.transposed();
  if (k) *k = invert_lower_triangular(L).transposed();
}

void Manifold::connection_fast(const Vec& x, Tensor3* gamma_chart, Mat* h,
                               Mat* k, Tensor3* gamma_frame) const {
  ChartPoint p(x);
  require_inside(p);
  MetricJet m = source_->eval(x);
  check_finite(m, x);
  const FramePair f = build_frame(m);
  const Christoffel c = build_christoffel(m, invert_spd(m.g));
  if (gamma_chart) *gamma_chart = c.gamma;
  if (h) *h = f.h;
  if (k) *k = f.k;
  if (gamma_frame) *gamma_frame = build_gamma_frame(f, c.gamma);
}

FrameVector to_frame(const Mat& h, const ChartVector& v) {
  return FrameVector(h.apply(v.components));
}

ChartVector to_chart(const Mat& k, const FrameVector& v) {
  return ChartVector(k.apply(v.components));
}

}  // namespace rgeom
