#pragma once

#include <cmath>
#include <vector>

#include "actopt/matrix.hpp"

namespace actopt {

// Companion matrix of x^n + a1 x^{n-1} + ... + an: ones on the
// superdiagonal, bottom row (-an, ..., -a1).
inline Matrix companion(const CharPoly& cp) {
  const Index n = cp.degree();
  if (n < 2) throw DimensionError("companion: n >= 2 required");
  Matrix c(n, n);
  for (Index i = 0; i + 1 < n; ++i) c(i, i + 1) = 1.0;
  for (Index j = 0; j < n; ++j) c(n - 1, j) = -cp.coeffs[n - 1 - j];
  return c;
}

// p_k(A) = A^{n-k} + sum_{j=1}^{n-k} a_j A^{n-k-j} for k < n, p_n = Id.
// Built from a power table A^0 ... A^{n-1} computed once.
inline std::vector<Matrix> pk_matrices(const Matrix& a, const CharPoly& cp) {
  if (!a.square()) throw DimensionError("pk_matrices: non-square A");
  const Index n = a.rows();
  if (cp.degree() != n) throw InvalidInputError("pk_matrices: degree mismatch");
  std::vector<Matrix> powers;
  powers.reserve(n);
  powers.push_back(Matrix::identity(n));
  for (Index k = 1; k < n; ++k) powers.push_back(powers.back() * a);

  std::vector<Matrix> pk;
  pk.reserve(n);
  for (Index k = 1; k <= n; ++k) {
    if (k == n) {
      pk.push_back(Matrix::identity(n));
      break;
    }
    Matrix m = powers[n - k];
    for (Index j = 1; j <= n - k; ++j) m += cp.coeffs[j - 1] * powers[n - k - j];
    pk.push_back(std::move(m));
  }
  return pk;
}

struct BrunovskyBasis {
  Matrix p;                  // columns f_1 ... f_n
  std::vector<Matrix> pk;    // p_1(A) ... p_n(A)
  Matrix companion_form;     // the companion matrix of A
};

// Caches everything that depends on A alone, so many b can be evaluated
// against a fixed system cheaply.
class BrunovskyCache {
 public:
  explicit BrunovskyCache(const Matrix& a)
      : a_(a), cp_(char_poly(a)), pk_(pk_matrices(a, cp_)) {
    if (a.rows() < 2) throw DimensionError("BrunovskyCache: n >= 2 required");
  }

  const Matrix& dynamics() const { return a_; }
  const CharPoly& poly() const { return cp_; }
  const std::vector<Matrix>& pk() const { return pk_; }
  Index dim() const { return a_.rows(); }

  Matrix basis_columns(const Vector& b) const {
    const Index n = dim();
    if (b.size() != n) throw DimensionError("basis_columns: b dimension mismatch");
    Matrix p(n, n);
    for (Index k = 0; k < n; ++k) {
      const Vector fk = pk_[k] * b;
      for (Index i = 0; i < n; ++i) p(i, k) = fk[i];
    }
    return p;
  }

  // M(b) = sum_k p_k(A) b b^T p_k(A)^T, symmetrized after assembly.
  Matrix gram(const Vector& b) const {
    const Index n = dim();
    if (b.size() != n) throw DimensionError("gram: b dimension mismatch");
    Matrix m(n, n);
    for (Index k = 0; k < n; ++k) {
      const Vector fk = pk_[k] * b;
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) m(i, j) += fk[i] * fk[j];
    }
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) {
        const double s = 0.5 * (m(i, j) + m(j, i));
        m(i, j) = s;
        m(j, i) = s;
      }
    return m;
  }

 private:
  Matrix a_;
  CharPoly cp_;
  std::vector<Matrix> pk_;
};

inline Matrix gram(const Matrix& a, const Vector& b) {
  return BrunovskyCache(a).gram(b);
}

inline BrunovskyBasis basis_matrix(const Matrix& a, const Vector& b,
                                   double tol = kDefaultRankTol) {
  const Index r = rank(kalman_matrix(a, b), tol);
  if (r != a.rows())
    throw NonControllableError("basis_matrix: (A, b) fails the Kalman rank condition", r);
  BrunovskyCache cache(a);
  BrunovskyBasis basis;
  basis.p = cache.basis_columns(b);
  basis.pk = cache.pk();
  basis.companion_form = companion(cache.poly());
  return basis;
}

struct BrunovskyResiduals {
  double similarity;  // ||AP - P*companion||_F / (||A||_F ||P||_F)
  double last_column; // ||P e_n - b|| / ||b||
};

inline BrunovskyResiduals verify_brunovsky(const Matrix& a, const Vector& b,
                                           double tol = kDefaultRankTol) {
  const BrunovskyBasis basis = basis_matrix(a, b, tol);
  const Index n = a.rows();
  const Matrix lhs = a * basis.p;
  const Matrix rhs = basis.p * basis.companion_form;
  BrunovskyResiduals res;
  res.similarity = (lhs - rhs).frobenius_norm() /
                   (a.frobenius_norm() * basis.p.frobenius_norm());
  double diff = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double d = basis.p(i, n - 1) - b[i];
    diff += d * d;
  }
  res.last_column = std::sqrt(diff) / norm(b);
  return res;
}

// Smallest eigenvalue of the 2x2 heat Gram matrix on the unit circle,
// written out in closed form.
inline double closed_form_lambda1_heat2(const Vector& b) {
  if (b.size() != 2) throw DimensionError("closed_form_lambda1_heat2: b must have length 2");
  const double b1 = b[0], b2 = b[1];
  const double q1 = 2.0 * b1 * b1 + 2.0 * b1 * b2 + b2 * b2;
  const double q2 = b1 * b1 + 2.0 * b1 * b2 + 2.0 * b2 * b2;
  return 4.0 * b1 * b2 + 3.0 * (b1 * b1 + b2 * b2) - 2.0 * std::sqrt(q1 * q2);
}

}  // namespace actopt
