#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "rgeom/errors.hpp"

namespace rgeom {

/// Zero-initialized buffer with inline storage for the small sizes the
/// chart dimensions produce; falls back to the heap beyond that.
template <size_t InlineCap>
class SmallBuf {
 public:
  SmallBuf() = default;
  explicit SmallBuf(size_t n) { resize(n); }

  void resize(size_t n) {
    size_ = n;
    if (n > InlineCap)
      heap_.assign(n, 0.0);
    else
      std::fill(stack_, stack_ + n, 0.0);
  }

  size_t size() const { return size_; }
  double* data() { return size_ > InlineCap ? heap_.data() : stack_; }
  const double* data() const {
    return size_ > InlineCap ? heap_.data() : stack_;
  }
  double& operator[](size_t i) { return data()[i]; }
  double operator[](size_t i) const { return data()[i]; }

 private:
  size_t size_ = 0;
  double stack_[InlineCap] = {};
  std::vector<double> heap_;
};

/// Dense real vector of small dimension (chart dimension n, typically 1..4).
class Vec {
 public:
  Vec() = default;
  explicit Vec(int n) : data_(static_cast<size_t>(n)) {}
  Vec(std::initializer_list<double> init) : data_(init.size()) {
    size_t i = 0;
    for (double v : init) data_[i++] = v;
  }

  int size() const { return static_cast<int>(data_.size()); }
  double& operator[](int i) { return data_[static_cast<size_t>(i)]; }
  double operator[](int i) const { return data_[static_cast<size_t>(i)]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Vec& operator+=(const Vec& o);
  Vec& operator-=(const Vec& o);
  Vec& operator*=(double s);

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator-(Vec a) { return a *= -1.0; }

  bool finite() const;

 private:
  SmallBuf<8> data_;
};

double dot(const Vec& a, const Vec& b);
double norm(const Vec& a);
double norm_inf(const Vec& a);

/// Dense row-major matrix.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols)
      : rows_(rows), cols_(cols),
        data_(static_cast<size_t>(rows) * static_cast<size_t>(cols)) {}

  static Mat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double& operator()(int i, int j) { return data_[idx(i, j)]; }
  double operator()(int i, int j) const { return data_[idx(i, j)]; }

  Mat& operator+=(const Mat& o);
  Mat& operator-=(const Mat& o);
  Mat& operator*=(double s);
  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(Mat a, double s) { return a *= s; }
  friend Mat operator*(double s, Mat a) { return a *= s; }

  Vec apply(const Vec& v) const;           // this * v
  Mat multiply(const Mat& o) const;        // this * o
  Mat transposed() const;

  const double* data() const { return data_.data(); }
  double* data() { return data_.data(); }

 private:
  size_t idx(int i, int j) const {
    return static_cast<size_t>(i) * static_cast<size_t>(cols_) +
           static_cast<size_t>(j);
  }
  int rows_ = 0;
  int cols_ = 0;
  SmallBuf<16> data_;
};

double norm_inf(const Mat& a);
/// Largest |a(i,j) - (i==j)| — distance from the identity, used for
/// orthogonality residuals.
double identity_distance(const Mat& a);

/// Rank-3 array T(i,j,k), all extents n.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), data_(static_cast<size_t>(n) * n * n) {}

  int dim() const { return n_; }
  double& operator()(int i, int j, int k) { return data_[idx(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[idx(i, j, k)]; }

  /// Contract the last two indices with vectors: out_i = T(i,j,k) a_j b_k.
  Vec apply(const Vec& a, const Vec& b) const;

  Tensor3& operator+=(const Tensor3& o);
  Tensor3& operator-=(const Tensor3& o);
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }

 private:
  size_t idx(int i, int j, int k) const {
    return (static_cast<size_t>(i) * n_ + j) * n_ + k;
  }
  int n_ = 0;
  SmallBuf<27> data_;
};

double norm_inf(const Tensor3& t);

/// Rank-4 array T(i,j,k,l), all extents n.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n)
      : n_(n), data_(static_cast<size_t>(n) * n * n * n) {}

  int dim() const { return n_; }
  double& operator()(int i, int j, int k, int l) { return data_[idx(i, j, k, l)]; }
  double operator()(int i, int j, int k, int l) const { return data_[idx(i, j, k, l)]; }

  /// Contract the last three indices: out_i = T(i,j,k,l) a_j b_k c_l.
  Vec apply(const Vec& a, const Vec& b, const Vec& c) const;

  Tensor4& operator-=(const Tensor4& o);
  friend Tensor4 operator-(Tensor4 a, const Tensor4& b) { return a -= b; }

 private:
  size_t idx(int i, int j, int k, int l) const {
    return ((static_cast<size_t>(i) * n_ + j) * n_ + k) * n_ + l;
  }
  int n_ = 0;
  SmallBuf<16> data_;
};

double norm_inf(const Tensor4& t);

/// Cholesky factor: g = L L^T with L lower triangular, positive diagonal.
/// Throws DomainError when g is not positive definite.
Mat cholesky_lower(const Mat& g);

/// Differential of the Cholesky factor: given g = L L^T and a symmetric
/// perturbation dg, returns dL with dg = dL L^T + L dL^T.
Mat cholesky_lower_differential(const Mat& L, const Mat& dg);

/// Inverse of a lower-triangular matrix.
Mat invert_lower_triangular(const Mat& L);

/// General small-matrix inverse via partially pivoted LU.
Mat invert(const Mat& a);

/// Inverse of a symmetric positive definite matrix via its Cholesky factor.
Mat invert_spd(const Mat& g);

/// Solve a x = b via partially pivoted LU.
Vec solve(const Mat& a, const Vec& b);

}  // namespace rgeom
