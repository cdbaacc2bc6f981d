#include "rgeom/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace rgeom {

Vec& Vec::operator+=(const Vec& o) {
  for (int i = 0; i < size(); ++i) data_[static_cast<size_t>(i)] += o[i];
  return *this;
}

Vec& Vec::operator-=(const Vec& o) {
  for (int i = 0; i < size(); ++i) data_[static_cast<size_t>(i)] -= o[i];
  return *this;
}

Vec& Vec::operator*=(double s) {
  for (size_t i = 0; i < data_.size(); ++i) data_[i] *= s;
  return *this;
}

bool Vec::finite() const {
  for (size_t i = 0; i < data_.size(); ++i)
    if (!std::isfinite(data_[i])) return false;
  return true;
}

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vec& a) {
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i]));
  return m;
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat& Mat::operator+=(const Mat& o) {
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Mat& Mat::operator-=(const Mat& o) {
  for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (size_t i = 0; i < data_.size(); ++i) data_[i] *= s;
  return *this;
}

Vec Mat::apply(const Vec& v) const {
  Vec out(rows_);
  for (int i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (int j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

Mat Mat::multiply(const Mat& o) const {
  Mat out(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const double v = (*this)(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < o.cols_; ++j) out(i, j) += v * o(k, j);
    }
  return out;
}

Mat Mat::transposed() const {
  Mat out(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

double norm_inf(const Mat& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j)));
  return m;
}

double identity_distance(const Mat& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      m = std::max(m, std::fabs(a(i, j) - (i == j ? 1.0 : 0.0)));
  return m;
}

Vec Tensor3::apply(const Vec& a, const Vec& b) const {
  Vec out(n_);
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) s += (*this)(i, j, k) * a[j] * b[k];
    out[i] = s;
  }
  return out;
}

Tensor3& Tensor3::operator+=(const Tensor3& o) {
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& o) {
  for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

double norm_inf(const Tensor3& t) {
  double m = 0.0;
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j)
      for (int k = 0; k < t.dim(); ++k) m = std::max(m, std::fabs(t(i, j, k)));
  return m;
}

Vec Tensor4::apply(const Vec& a, const Vec& b, const Vec& c) const {
  Vec out(n_);
  for (int i = 0; i < n_; ++i) {
    double s = 0.0;
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) s += (*this)(i, j, k, l) * a[j] * b[k] * c[l];
    out[i] = s;
  }
  return out;
}

Tensor4& Tensor4::operator-=(const Tensor4& o) {
  for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

double norm_inf(const Tensor4& t) {
  double m = 0.0;
  for (int i = 0; i < t.dim(); ++i)
    for (int j = 0; j < t.dim(); ++j)
      for (int k = 0; k < t.dim(); ++k)
        for (int l = 0; l < t.dim(); ++l)
          m = std::max(m, std::fabs(t(i, j, k, l)));
  return m;
}

Mat cholesky_lower(const Mat& g) {
  const int n = g.rows();
  Mat L(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = g(i, j);
      for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      if (i == j) {
        if (!(s > 0.0))
          throw DomainError("metric is not positive definite");
        L(i, i) = std::sqrt(s);
      } else {
        L(i, j) = s / L(j, j);
      }
    }
  }
  return L;
}

Mat cholesky_lower_differential(const Mat& L, const Mat& dg) {
  // dL = L * Phi(L^-1 dg L^-T), Phi = lower part with halved diagonal.
  const Mat Linv = invert_lower_triangular(L);
  const Mat A = Linv.multiply(dg).multiply(Linv.transposed());
  const int n = L.rows();
  Mat phi(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) phi(i, j) = A(i, j);
    phi(i, i) = 0.5 * A(i, i);
  }
  return L.multiply(phi);
}

Mat invert_lower_triangular(const Mat& L) {
  const int n = L.rows();
  Mat inv(n, n);
  for (int j = 0; j < n; ++j) {
    inv(j, j) = 1.0 / L(j, j);
    for (int i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (int k = j; k < i; ++k) s += L(i, k) * inv(k, j);
      inv(i, j) = -s / L(i, i);
    }
  }
  return inv;
}

Mat invert_spd(const Mat& g) {
  const Mat linv = invert_lower_triangular(cholesky_lower(g));
  return linv.transposed().multiply(linv);
}

namespace {

constexpr int kMaxPivot = 64;

// LU with partial pivoting; returns false on singularity.
bool lu_factor(Mat& a, int* piv) {
  const int n = a.rows();
  for (int i = 0; i < n; ++i) piv[static_cast<size_t>(i)] = i;
  for (int col = 0; col < n; ++col) {
    int best = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(best, col))) best = r;
    if (a(best, col) == 0.0) return false;
    if (best != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(best, j));
      std::swap(piv[static_cast<size_t>(col)], piv[static_cast<size_t>(best)]);
    }
    for (int r = col + 1; r < n; ++r) {
      a(r, col) /= a(col, col);
      for (int j = col + 1; j < n; ++j) a(r, j) -= a(r, col) * a(col, j);
    }
  }
  return true;
}

Vec lu_solve(const Mat& lu, const int* piv, const Vec& b) {
  const int n = lu.rows();
  Vec x(n);
  for (int i = 0; i < n; ++i) x[i] = b[piv[static_cast<size_t>(i)]];
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
    x[i] /= lu(i, i);
  }
  return x;
}

}  // namespace

Mat invert(const Mat& a) {
  if (a.rows() > kMaxPivot) throw ConfigError("matrix dimension too large");
  Mat lu = a;
  int piv[kMaxPivot];
  if (!lu_factor(lu, piv)) throw DomainError("singular matrix");
  const int n = a.rows();
  Mat inv(n, n);
  for (int j = 0; j < n; ++j) {
    Vec e(n);
    e[j] = 1.0;
    Vec col = lu_solve(lu, piv, e);
    for (int i = 0; i < n; ++i) inv(i, j) = col[i];
  }
  return inv;
}

Vec solve(const Mat& a, const Vec& b) {
  if (a.rows() > kMaxPivot) throw ConfigError("matrix dimension too large");
  Mat lu = a;
  int piv[kMaxPivot];
  if (!lu_factor(lu, piv)) throw DomainError("singular matrix");
  return lu_solve(lu, piv, b);
}

}  // namespace rgeom
