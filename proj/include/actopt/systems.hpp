#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "actopt/matrix.hpp"

namespace actopt {

enum class Scaling { none, h_squared };

enum class SystemKind { heat, wave, advection_plus, advection_minus, custom };

// h = 1/(n-1) for n grid points on (0, 1).
inline double grid_spacing(Index n) {
  if (n < 2) throw DimensionError("grid_spacing: n >= 2 required");
  return 1.0 / static_cast<double>(n - 1);
}

// Tridiagonal finite-difference Dirichlet Laplacian: -2 on the diagonal,
// 1 off-diagonal, times 1/h^2 when scaled.
inline Matrix dirichlet_laplacian(Index n, Scaling scaling = Scaling::none) {
  if (n < 2) throw DimensionError("dirichlet_laplacian: n >= 2 required");
  const double factor =
      scaling == Scaling::h_squared ? 1.0 / (grid_spacing(n) * grid_spacing(n)) : 1.0;
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = -2.0 * factor;
    if (i + 1 < n) {
      a(i, i + 1) = factor;
      a(i + 1, i) = factor;
    }
  }
  return a;
}

// Explicit spectrum lambda_j = -(4/h^2) sin^2(pi j / (2(n+1))), ascending.
inline std::vector<double> laplacian_eigs(Index n, double h) {
  if (n < 2) throw DimensionError("laplacian_eigs: n >= 2 required");
  if (h <= 0.0) throw InvalidInputError("laplacian_eigs: h must be positive");
  const double pi = std::acos(-1.0);
  std::vector<double> eigs(n);
  for (Index j = 1; j <= n; ++j) {
    const double s = std::sin(pi * static_cast<double>(j) /
                              (2.0 * static_cast<double>(n + 1)));
    eigs[n - j] = -(4.0 / (h * h)) * s * s;
  }
  return eigs;
}

// First-order wave system [[0, Id],[Laplacian, 0]], 2n x 2n.
inline Matrix wave_dynamics(Index n, Scaling scaling = Scaling::none) {
  const Matrix lap = dirichlet_laplacian(n, scaling);
  Matrix a(2 * n, 2 * n);
  for (Index i = 0; i < n; ++i) {
    a(i, n + i) = 1.0;
    for (Index j = 0; j < n; ++j) a(n + i, j) = lap(i, j);
  }
  return a;
}

// Wave actuators act on the velocity component: b in R^n maps to
// (0, b) in R^{2n}.
inline Vector wave_embed(const Vector& b) {
  Vector full(2 * b.size(), 0.0);
  for (Index i = 0; i < b.size(); ++i) full[b.size() + i] = b[i];
  return full;
}

// Laplacian plus centered-difference advection, sign +1 or -1 in front
// of the skew part.
inline Matrix advection_diffusion(Index n, int sign, Scaling scaling = Scaling::none) {
  if (n < 2) throw DimensionError("advection_diffusion: n >= 2 required");
  if (sign != 1 && sign != -1)
    throw InvalidInputError("advection_diffusion: sign must be +1 or -1");
  const double h = scaling == Scaling::h_squared ? grid_spacing(n) : 1.0;
  Matrix a = dirichlet_laplacian(n, scaling);
  const double adv = static_cast<double>(sign) / (2.0 * h);
  for (Index i = 0; i + 1 < n; ++i) {
    a(i, i + 1) += adv;
    a(i + 1, i) -= adv;
  }
  return a;
}

struct SystemSpec {
  SystemKind kind = SystemKind::heat;
  Index n = 2;                       // grid-point count (state dim is 2n for wave)
  Scaling scaling = Scaling::none;
  Matrix custom;                     // used when kind == custom

  Matrix dynamics() const {
    switch (kind) {
      case SystemKind::heat: return dirichlet_laplacian(n, scaling);
      case SystemKind::wave: return wave_dynamics(n, scaling);
      case SystemKind::advection_plus: return advection_diffusion(n, 1, scaling);
      case SystemKind::advection_minus: return advection_diffusion(n, -1, scaling);
      case SystemKind::custom: return custom;
    }
    throw InvalidInputError("SystemSpec: unknown kind");
  }

  // Dimension of the optimization variable b.
  Index actuator_dim() const {
    if (kind == SystemKind::custom) return custom.rows();
    return n;
  }

  Vector embed_actuator(const Vector& b) const {
    return kind == SystemKind::wave ? wave_embed(b) : b;
  }
};

inline SystemKind parse_system_kind(const std::string& name) {
  if (name == "heat") return SystemKind::heat;
  if (name == "wave") return SystemKind::wave;
  if (name == "advection-plus") return SystemKind::advection_plus;
  if (name == "advection-minus") return SystemKind::advection_minus;
  if (name == "custom") return SystemKind::custom;
  throw InvalidInputError("unknown system kind: " + name);
}

}  // namespace actopt
