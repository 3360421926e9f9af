#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "actopt/brunovsky.hpp"
#include "actopt/matrix.hpp"
#include "actopt/spectral.hpp"

namespace actopt {

struct IllConditionedError : std::runtime_error {
  double condition_estimate;
  IllConditionedError(const std::string& what, double cond)
      : std::runtime_error(what), condition_estimate(cond) {}
};

namespace detail {

// Solve A X = B by LU with partial pivoting (A square, overwritten copy).
inline Matrix lu_solve(Matrix a, Matrix b) {
  const Index n = a.rows();
  if (!a.square() || b.rows() != n) throw DimensionError("lu_solve: shape mismatch");
  std::vector<Index> perm(n);
  for (Index i = 0; i < n; ++i) perm[i] = i;
  for (Index k = 0; k < n; ++k) {
    Index piv = k;
    for (Index i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) < 1e-300)
      throw NumericRangeError("lu_solve: singular matrix");
    if (piv != k) {
      for (Index j = 0; j < n; ++j) std::swap(a(piv, j), a(k, j));
      for (Index j = 0; j < b.cols(); ++j) std::swap(b(piv, j), b(k, j));
    }
    for (Index i = k + 1; i < n; ++i) {
      const double f = a(i, k) / a(k, k);
      a(i, k) = f;
      for (Index j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
      for (Index j = 0; j < b.cols(); ++j) b(i, j) -= f * b(k, j);
    }
  }
  for (Index k = n; k-- > 0;) {
    for (Index j = 0; j < b.cols(); ++j) {
      double s = b(k, j);
      for (Index i = k + 1; i < n; ++i) s -= a(k, i) * b(i, j);
      b(k, j) = s / a(k, k);
    }
  }
  return b;
}

inline double one_norm(const Matrix& m) {
  double best = 0.0;
  for (Index j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (Index i = 0; i < m.rows(); ++i) s += std::abs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

}  // namespace detail

// Matrix exponential, scaling-and-squaring with the degree-13 Pade
// approximant (Higham 2005 coefficients).
inline Matrix expm(const Matrix& a) {
  if (!a.square()) throw DimensionError("expm: non-square input");
  if (!a.all_finite()) throw InvalidInputError("expm: non-finite entries");
  const Index n = a.rows();
  const double nrm = detail::one_norm(a);
  if (nrm > 1e6) throw NumericRangeError("expm: norm too large");
  const double theta13 = 5.371920351148152;
  int squarings = 0;
  if (nrm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
  }
  Matrix as = a * std::pow(2.0, -squarings);

  static const double c[14] = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
      1187353796428800.0,  129060195264000.0,   10559470521600.0,
      670442572800.0,      33522128640.0,       1323241920.0,
      40840800.0,          960960.0,            16380.0,
      182.0,               1.0};

  const Matrix a2 = as * as;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix id = Matrix::identity(n);

  Matrix u = a6 * (c[13] * a6 + c[11] * a4 + c[9] * a2) +
             c[7] * a6 + c[5] * a4 + c[3] * a2 + c[1] * id;
  u = as * u;
  Matrix v = a6 * (c[12] * a6 + c[10] * a4 + c[8] * a2) +
             c[6] * a6 + c[4] * a4 + c[2] * a2 + c[0] * id;

  Matrix r = detail::lu_solve(v - u, v + u);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

// Controllability Gramian W_T = int_0^T e^{As} b b^T e^{A^T s} ds via the
// Van Loan block-exponential: exponentiate [[-A, bb^T],[0, A^T]] at T,
// then W = F22^T G with G the top-right block.
inline Matrix gramian(const Matrix& a, const Vector& b, double horizon) {
  if (!a.square() || a.rows() != b.size())
    throw DimensionError("gramian: dimension mismatch");
  if (horizon <= 0.0) throw InvalidInputError("gramian: T must be positive");
  const Index n = a.rows();
  Matrix block(2 * n, 2 * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      block(i, j) = -a(i, j) * horizon;
      block(i, n + j) = b[i] * b[j] * horizon;
      block(n + i, n + j) = a(j, i) * horizon;
    }
  const Matrix e = expm(block);
  Matrix g(n, n), f22(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      g(i, j) = e(i, n + j);
      f22(i, j) = e(n + i, n + j);
    }
  Matrix w = f22.transpose() * g;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double s = 0.5 * (w(i, j) + w(j, i));
      w(i, j) = s;
      w(j, i) = s;
    }
  return w;
}

namespace detail {

inline Matrix gramian_integrand(const Matrix& a, const Vector& b, double s) {
  const Vector v = expm(a * s) * b;
  return outer(v, v);
}

inline Matrix simpson_recurse(const Matrix& a, const Vector& b, double lo, double hi,
                              const Matrix& flo, const Matrix& fmid, const Matrix& fhi,
                              const Matrix& whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const Matrix fl = gramian_integrand(a, b, 0.5 * (lo + mid));
  const Matrix fr = gramian_integrand(a, b, 0.5 * (mid + hi));
  const double h6 = (hi - lo) / 12.0;
  const Matrix left = h6 * (flo + 4.0 * fl + fmid);
  const Matrix right = h6 * (fmid + 4.0 * fr + fhi);
  const Matrix sum = left + right;
  const double err = (sum - whole).frobenius_norm() / 15.0;
  if (depth >= 30 || err <= tol) return sum + (1.0 / 15.0) * (sum - whole);
  return simpson_recurse(a, b, lo, mid, flo, fl, fmid, left, 0.5 * tol, depth + 1) +
         simpson_recurse(a, b, mid, hi, fmid, fr, fhi, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

// Independent Gramian route: adaptive Simpson quadrature of the
// integrand, used as a cross-check against the block-exponential path.
inline Matrix gramian_quadrature(const Matrix& a, const Vector& b, double horizon,
                                 double tol = 1e-10) {
  if (horizon <= 0.0) throw InvalidInputError("gramian_quadrature: T must be positive");
  const Matrix flo = detail::gramian_integrand(a, b, 0.0);
  const Matrix fmid = detail::gramian_integrand(a, b, 0.5 * horizon);
  const Matrix fhi = detail::gramian_integrand(a, b, horizon);
  const Matrix whole = (horizon / 6.0) * (flo + 4.0 * fmid + fhi);
  const double scale = std::max(whole.frobenius_norm(), 1.0);
  return detail::simpson_recurse(a, b, 0.0, horizon, flo, fmid, fhi, whole,
                                 tol * scale, 0);
}

namespace detail {

// Cholesky factor L (lower) of a symmetric positive definite matrix.
inline Matrix cholesky(const Matrix& w, double& min_pivot, double& max_pivot) {
  const Index n = w.rows();
  Matrix l(n, n);
  min_pivot = std::numeric_limits<double>::infinity();
  max_pivot = 0.0;
  for (Index j = 0; j < n; ++j) {
    double d = w(j, j);
    for (Index k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= 0.0)
      throw IllConditionedError("cholesky: matrix not numerically positive definite",
                                std::numeric_limits<double>::infinity());
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    min_pivot = std::min(min_pivot, ljj);
    max_pivot = std::max(max_pivot, ljj);
    for (Index i = j + 1; i < n; ++i) {
      double s = w(i, j);
      for (Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / ljj;
    }
  }
  return l;
}

// Forward substitution: solve L X = B for lower-triangular L.
inline Matrix forward_solve(const Matrix& l, const Matrix& b) {
  const Index n = l.rows();
  Matrix x = b;
  for (Index j = 0; j < x.cols(); ++j)
    for (Index i = 0; i < n; ++i) {
      double s = x(i, j);
      for (Index k = 0; k < i; ++k) s -= l(i, k) * x(k, j);
      x(i, j) = s / l(i, i);
    }
  return x;
}

}  // namespace detail

// Exact controllability cost C(b, T): operator norm of the map from
// initial datum to minimal-norm steering control, computed as
// sqrt(lambda_max(E^T W^{-1} E)) with E = e^{AT}, through the Cholesky
// factor of W rather than an explicit inverse.
inline double exact_cost(const Matrix& a, const Vector& b, double horizon,
                         double tol = kDefaultRankTol) {
  const Index r = rank(kalman_matrix(a, b), tol);
  if (r != a.rows())
    throw NonControllableError("exact_cost: (A, b) fails the Kalman rank condition", r);
  if (horizon <= 0.0) throw InvalidInputError("exact_cost: T must be positive");
  const Matrix w = gramian(a, b, horizon);
  double min_pivot = 0.0, max_pivot = 0.0;
  const Matrix l = detail::cholesky(w, min_pivot, max_pivot);
  const double cond = (max_pivot / min_pivot) * (max_pivot / min_pivot);
  if (cond > 1e16)
    throw IllConditionedError("exact_cost: Gramian numerically singular", cond);
  const Matrix e = expm(a * horizon);
  const Matrix s = detail::forward_solve(l, e);  // L^{-1} E
  const Matrix sts = s.transpose() * s;          // E^T W^{-1} E, symmetric
  const std::vector<double> eigs = jacobi_spectrum(sts);
  return std::sqrt(eigs.back());
}

// kappa(T): controllability cost of the normalized pair (companion, e_n);
// depends on A only through its characteristic polynomial.
inline double kappa(const Matrix& a, double horizon) {
  const CharPoly cp = char_poly(a);
  const Matrix comp = companion(cp);
  Vector en(comp.rows(), 0.0);
  en.back() = 1.0;
  return exact_cost(comp, en, horizon);
}

struct CostReport {
  double exact_cost;
  double kappa;
  double inverse_norm;
  double upper_bound;  // kappa * inverse_norm
  double ratio;        // exact_cost / upper_bound, <= 1 up to roundoff
};

inline CostReport factorization_report(const Matrix& a, const Vector& b, double horizon) {
  CostReport rep;
  rep.exact_cost = exact_cost(a, b, horizon);
  rep.kappa = kappa(a, horizon);
  rep.inverse_norm = inverse_norm(a, b);
  rep.upper_bound = rep.kappa * rep.inverse_norm;
  rep.ratio = rep.exact_cost / rep.upper_bound;
  return rep;
}

// Least-squares slope of log kappa(A, T) against log T; approaches
// -(n+1)/2 as T -> 0.
inline double blowup_exponent(const Matrix& a, const std::vector<double>& t_grid) {
  if (t_grid.size() < 4)
    throw InvalidInputError("blowup_exponent: need at least 4 grid points");
  double lo = t_grid.front(), hi = t_grid.front();
  for (double t : t_grid) {
    if (t <= 0.0) throw InvalidInputError("blowup_exponent: T values must be positive");
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  if (hi / lo < 1.0 + 1e-9)
    throw InvalidInputError("blowup_exponent: degenerate T grid");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(t_grid.size());
  for (double t : t_grid) {
    const double x = std::log(t);
    const double y = std::log(kappa(a, t));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace actopt
