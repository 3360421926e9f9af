#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "actopt/brunovsky.hpp"
#include "actopt/matrix.hpp"

namespace actopt {

struct EigResult {
  double value = 0.0;
  Vector vector;
  Index iterations = 0;
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();
};

constexpr double kEigTol = 1e-12;
constexpr Index kEigMaxIter = 50000;

namespace detail {

inline Vector random_unit_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  double nrm = 0.0;
  while (nrm < 1e-12) {
    for (double& x : v) x = gauss(rng);
    nrm = norm(v);
  }
  for (double& x : v) x /= nrm;
  return v;
}

inline EigResult power_iterate(const Matrix& m, double tol, Index max_iter,
                               std::uint64_t seed, const Vector* start = nullptr) {
  const Index n = m.rows();
  const double scale = std::max(m.max_abs(), 1.0);
  // For a symmetric matrix the Rayleigh quotient is within the residual
  // norm of a true eigenvalue, so iterate until the residual hits the
  // machine-level floor (or stops shrinking).  The residual is free: it
  // reuses the matvec that drives the iteration.
  const double target = 100.0 * std::numeric_limits<double>::epsilon() * scale;
  EigResult res;
  Vector v = start ? *start : random_unit_vector(n, seed);
  double best_resid = std::numeric_limits<double>::infinity();
  Index stall = 0;
  for (Index it = 1; it <= max_iter; ++it) {
    const Vector w = m * v;
    const double rayleigh = dot(v, w);
    double resid = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double d = w[i] - rayleigh * v[i];
      resid += d * d;
    }
    resid = std::sqrt(resid);
    res.iterations = it;
    if (resid < 0.9 * best_resid) {
      best_resid = resid;
      res.value = rayleigh;
      res.vector = v;
      res.residual = resid;
      stall = 0;
    } else {
      ++stall;
    }
    if (best_resid <= target) {
      res.converged = true;
      return res;
    }
    if (stall > 2000) break;
    const double wn = norm(w);
    if (wn < 1e-300) {
      // v is (numerically) in the kernel and m has spectral radius ~0.
      res.value = 0.0;
      res.vector = v;
      res.converged = true;
      return res;
    }
    v = w;
    for (double& x : v) x /= wn;
  }
  res.converged = best_resid <= std::max(tol, 1e-9) * scale;
  return res;
}

}  // namespace detail

// Dominant eigenvalue of a symmetric matrix by power iteration.  When a
// tight eigenvalue cluster stalls the plain iteration, retry on a
// repeatedly squared copy (which blows up the eigenvalue ratio), then
// polish the resulting vector on the original matrix.
inline EigResult power_largest(const Matrix& m, double tol = kEigTol,
                               Index max_iter = kEigMaxIter, std::uint64_t seed = 1) {
  if (!m.square()) throw DimensionError("power_largest: non-square input");
  if (tol <= 0.0) throw InvalidInputError("power_largest: tol must be positive");
  EigResult res = detail::power_iterate(m, tol, std::min(max_iter, Index(5000)), seed);
  if (!res.converged) {
    Matrix sq = m;
    double mx = sq.max_abs();
    for (int s = 0; s < 16 && mx > 1e-300; ++s) {
      sq = sq * (1.0 / mx);
      sq = sq * sq;
      mx = sq.max_abs();
    }
    if (mx > 1e-300) {
      const EigResult guide =
          detail::power_iterate(sq, tol, max_iter, seed ^ 0x9e3779b97f4a7c15ULL);
      const EigResult polished =
          detail::power_iterate(m, tol, max_iter, seed, &guide.vector);
      if (polished.residual < res.residual) res = polished;
    }
  }
  return res;
}

// Smallest eigenvalue via spectral shift: find lambda_max, then the
// largest eigenvalue mu of lambda_max*Id - M; lambda_min = lambda_max - mu.
inline EigResult smallest_eig_shifted(const Matrix& m, double tol = kEigTol,
                                      Index max_iter = kEigMaxIter,
                                      std::uint64_t seed = 1) {
  const EigResult top = power_largest(m, tol, max_iter, seed);
  const Index n = m.rows();
  Matrix shifted(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      shifted(i, j) = (i == j ? top.value : 0.0) - m(i, j);
  const EigResult bottom = power_largest(shifted, tol, max_iter, seed + 1);
  EigResult res;
  res.value = top.value - bottom.value;
  res.vector = bottom.vector;
  res.iterations = top.iterations + bottom.iterations;
  res.converged = top.converged && bottom.converged;
  return res;
}

// Full spectrum of a symmetric matrix, ascending, by cyclic Jacobi sweeps.
// Serves as the independent oracle for the shifted power method.
inline std::vector<double> jacobi_spectrum(Matrix m) {
  if (!m.square()) throw DimensionError("jacobi_spectrum: non-square input");
  const Index n = m.rows();
  const double total = std::max(m.frobenius_norm(), 1e-300);
  const double target = 1e-12 * total;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += 2.0 * m(p, q) * m(p, q);
    if (std::sqrt(off) <= target) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double app = m(p, p), aqq = m(q, q);
        m(p, p) = app - t * apq;
        m(q, q) = aqq + t * apq;
        m(p, q) = 0.0;
        m(q, p) = 0.0;
        for (Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = m(r, p), arq = m(r, q);
          m(r, p) = m(p, r) = arp - s * (arq + tau * arp);
          m(r, q) = m(q, r) = arq + s * (arp - tau * arq);
        }
      }
    }
  }
  std::vector<double> eigs(n);
  for (Index i = 0; i < n; ++i) eigs[i] = m(i, i);
  std::sort(eigs.begin(), eigs.end());
  return eigs;
}

// lambda_1(M(b)) for unit b; continuous in b and zero exactly on the
// non-controllable set.
inline double objective(const BrunovskyCache& cache, const Vector& b,
                        std::uint64_t seed = 1) {
  return smallest_eig_shifted(cache.gram(b), kEigTol, kEigMaxIter, seed).value;
}

inline double objective(const Matrix& a, const Vector& b, std::uint64_t seed = 1) {
  return objective(BrunovskyCache(a), b, seed);
}

// ||P^{-1}(b)|| = lambda_1(P P^T)^{-1/2}; P^{-1} is never formed.
inline double inverse_norm(const Matrix& a, const Vector& b,
                           double tol = kDefaultRankTol) {
  const Index r = rank(kalman_matrix(a, b), tol);
  if (r != a.rows())
    throw NonControllableError("inverse_norm: (A, b) fails the Kalman rank condition", r);
  const double lambda1 = smallest_eig_shifted(gram(a, b)).value;
  return 1.0 / std::sqrt(lambda1);
}

}  // namespace actopt
