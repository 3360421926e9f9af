#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace actopt {

using Index = std::size_t;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericRangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when (A, b) fails the Kalman rank condition but full rank is required.
struct NonControllableError : std::runtime_error {
  Index numerical_rank;
  NonControllableError(const std::string& what, Index rank_found)
      : std::runtime_error(what), numerical_rank(rank_found) {}
};

using Vector = std::vector<double>;

inline double dot(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw DimensionError("dot: size mismatch");
  double s = 0.0;
  for (Index i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline double norm(const Vector& x) { return std::sqrt(dot(x, x)); }

// Dense real matrix, row-major storage.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}

  Matrix(Index rows, Index cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw DimensionError("Matrix: zero dimension");
  }

  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    if (rows_ == 0) throw DimensionError("Matrix: empty initializer");
    cols_ = rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer");
      for (double v : r) data_.push_back(v);
    }
  }

  static Matrix identity(Index n) {
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(Index i, Index j) { return data_[i * cols_ + j]; }
  double operator()(Index i, Index j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (Index i = 0; i < rows_; ++i)
      for (Index j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double trace() const {
    if (!square()) throw DimensionError("trace: non-square");
    // Kahan summation; traces feed the char-poly recursion where
    // cancellation matters.
    double s = 0.0, c = 0.0;
    for (Index i = 0; i < rows_; ++i) {
      double y = (*this)(i, i) - c;
      double t = s + y;
      c = (t - s) - y;
      s = t;
    }
    return s;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o, "operator+=");
    for (Index i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o, "operator-=");
    for (Index i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }

  Matrix& operator*=(double c) {
    for (double& v : data_) v *= c;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double c) { return a *= c; }
  friend Matrix operator*(double c, Matrix a) { return a *= c; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("matmul: inner dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (Index i = 0; i < a.rows_; ++i)
      for (Index k = 0; k < a.cols_; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (Index j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend Vector operator*(const Matrix& a, const Vector& x) {
    if (a.cols_ != x.size()) throw DimensionError("matvec: dimension mismatch");
    Vector y(a.rows_, 0.0);
    for (Index i = 0; i < a.rows_; ++i) {
      double s = 0.0;
      for (Index j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }

 private:
  void check_same_shape(const Matrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw DimensionError(std::string(op) + ": shape mismatch");
  }

  Index rows_;
  Index cols_;
  std::vector<double> data_;
};

inline Matrix outer(const Vector& x, const Vector& y) {
  Matrix m(x.size(), y.size());
  for (Index i = 0; i < x.size(); ++i)
    for (Index j = 0; j < y.size(); ++j) m(i, j) = x[i] * y[j];
  return m;
}

// Monic characteristic polynomial x^n + a1 x^{n-1} + ... + an,
// stored as {a1, ..., an}.
struct CharPoly {
  std::vector<double> coeffs;
  Index degree() const { return coeffs.size(); }
};

// Faddeev-LeVerrier recursion: M1 = A, c_k = -trace(A M_{k-1} ...)/k.
// O(n^4), exact up to roundoff, works for non-diagonalizable A.
inline CharPoly char_poly(const Matrix& a) {
  if (!a.square()) throw DimensionError("char_poly: non-square input");
  if (!a.all_finite()) throw InvalidInputError("char_poly: non-finite entries");
  const Index n = a.rows();
  CharPoly cp;
  cp.coeffs.resize(n);
  Matrix m = a;
  for (Index k = 1; k <= n; ++k) {
    const double ck = -m.trace() / static_cast<double>(k);
    cp.coeffs[k - 1] = ck;
    if (k < n) {
      Matrix shifted = m;
      for (Index i = 0; i < n; ++i) shifted(i, i) += ck;
      m = a * shifted;
    }
  }
  return cp;
}

// Evaluate the monic polynomial at A by Horner; returns p(A).
inline Matrix char_poly_at(const Matrix& a, const CharPoly& cp) {
  const Index n = a.rows();
  Matrix acc = Matrix::identity(n);
  for (double c : cp.coeffs) {
    acc = acc * a;
    for (Index i = 0; i < n; ++i) acc(i, i) += c;
  }
  return acc;
}

// Kalman controllability matrix [b, Ab, ..., A^{n-1} b].
inline Matrix kalman_matrix(const Matrix& a, const Vector& b) {
  if (!a.square()) throw DimensionError("kalman_matrix: non-square A");
  if (a.rows() != b.size()) throw DimensionError("kalman_matrix: b dimension mismatch");
  const Index n = a.rows();
  Matrix k(n, n);
  Vector col = b;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) k(i, j) = col[i];
    if (j + 1 < n) col = a * col;
  }
  return k;
}

// Numerical rank via row echelon with partial pivoting. A pivot counts
// when its magnitude exceeds tol times the largest row norm of the input.
inline Index rank(Matrix m, double tol) {
  if (tol <= 0.0) throw InvalidInputError("rank: tol must be positive");
  const Index rows = m.rows(), cols = m.cols();
  double max_row_norm = 0.0;
  for (Index i = 0; i < rows; ++i) {
    double s = 0.0;
    for (Index j = 0; j < cols; ++j) s += m(i, j) * m(i, j);
    max_row_norm = std::max(max_row_norm, std::sqrt(s));
  }
  const double threshold = tol * std::max(max_row_norm, 1e-300);
  Index r = 0;
  for (Index col = 0; col < cols && r < rows; ++col) {
    Index piv = r;
    for (Index i = r + 1; i < rows; ++i)
      if (std::abs(m(i, col)) > std::abs(m(piv, col))) piv = i;
    if (std::abs(m(piv, col)) <= threshold) continue;
    if (piv != r)
      for (Index j = 0; j < cols; ++j) std::swap(m(piv, j), m(r, j));
    for (Index i = r + 1; i < rows; ++i) {
      const double f = m(i, col) / m(r, col);
      for (Index j = col; j < cols; ++j) m(i, j) -= f * m(r, j);
    }
    ++r;
  }
  return r;
}

constexpr double kDefaultRankTol = 1e-10;

inline bool is_cyclic(const Matrix& a, const Vector& b, double tol = kDefaultRankTol) {
  return rank(kalman_matrix(a, b), tol) == a.rows();
}

}  // namespace actopt
