#pragma once

#include <random>

#include "actopt/matrix.hpp"

namespace actopt::testing {

inline Matrix random_matrix(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = gauss(rng);
  return a;
}

inline Vector random_unit(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(n);
  double nrm = 0.0;
  while (nrm < 1e-8) {
    for (double& x : v) x = gauss(rng);
    nrm = norm(v);
  }
  for (double& x : v) x /= nrm;
  return v;
}

// Random orthogonal matrix via Gram-Schmidt on a Gaussian matrix.
inline Matrix random_orthogonal(Index n, std::mt19937_64& rng) {
  Matrix g = random_matrix(n, rng);
  Matrix q(n, n);
  for (Index j = 0; j < n; ++j) {
    Vector col(n);
    for (Index i = 0; i < n; ++i) col[i] = g(i, j);
    for (Index k = 0; k < j; ++k) {
      double proj = 0.0;
      for (Index i = 0; i < n; ++i) proj += q(i, k) * col[i];
      for (Index i = 0; i < n; ++i) col[i] -= proj * q(i, k);
    }
    const double nrm = norm(col);
    for (Index i = 0; i < n; ++i) q(i, j) = col[i] / nrm;
  }
  return q;
}

// Draws (A, b) until the pair satisfies the Kalman rank condition.
inline std::pair<Matrix, Vector> random_cyclic_pair(Index n, std::mt19937_64& rng) {
  for (;;) {
    Matrix a = random_matrix(n, rng);
    Vector b = random_unit(n, rng);
    if (is_cyclic(a, b)) return {a, b};
  }
}

}  // namespace actopt::testing
