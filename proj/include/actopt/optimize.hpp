#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "actopt/brunovsky.hpp"
#include "actopt/matrix.hpp"
#include "actopt/spectral.hpp"

namespace actopt {

struct NoControllableDirectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidSymmetryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Empty when the vector is numerically zero; the caller must resample.
inline std::optional<Vector> project_to_sphere(const Vector& v) {
  const double n = norm(v);
  if (n < 1e-300) return std::nullopt;
  Vector out = v;
  for (double& x : out) x /= n;
  return out;
}

struct DEConfig {
  Index population_size = 0;   // 0 -> 15 * dim
  double mutation_weight = 0.8;
  double crossover_rate = 0.9;
  Index max_generations = 0;   // 0 -> 300 * dim
  double stall_tolerance = 1e-12;
  std::uint64_t seed = 0;
  Index starts = 1;
  Index threads = 1;

  void validate() const {
    if (mutation_weight <= 0.0 || mutation_weight > 2.0)
      throw InvalidInputError("DEConfig: F must be in (0, 2]");
    if (crossover_rate < 0.0 || crossover_rate > 1.0)
      throw InvalidInputError("DEConfig: CR must be in [0, 1]");
  }
};

struct OptimizationResult {
  Vector best_b;
  double best_value = 0.0;
  Index generations = 0;
  Index evaluations = 0;
  std::uint64_t seed = 0;
  std::vector<double> history;  // per-generation best, non-decreasing
  std::vector<Vector> orbit;    // filled by symmetry_orbit when requested
};

using ObjectiveFn = std::function<double(const Vector&)>;

namespace detail {

inline Vector random_direction(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    Vector v(dim);
    for (double& x : v) x = gauss(rng);
    if (auto unit = project_to_sphere(v)) return *unit;
  }
}

// Evaluates fitness[i] = f(points[i]) for the given index range; results
// land in a fixed slot per index so thread count cannot change them.
inline void evaluate_block(const ObjectiveFn& f, const std::vector<Vector>& points,
                           std::vector<double>& fitness, Index threads) {
  const Index count = points.size();
  if (threads <= 1 || count < 2) {
    for (Index i = 0; i < count; ++i) fitness[i] = f(points[i]);
    return;
  }
  const Index workers = std::min<Index>(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (Index i = w; i < count; i += workers) fitness[i] = f(points[i]);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

// DE/rand/1/bin on the unit sphere: mutation by vector differences,
// binomial crossover, trials projected back to the sphere, greedy
// selection. All RNG draws happen serially in index order, so a given
// seed yields identical results for any thread count.
inline OptimizationResult differential_evolution(const ObjectiveFn& f, Index dim,
                                                 DEConfig cfg) {
  cfg.validate();
  if (dim < 2) throw DimensionError("differential_evolution: dim >= 2 required");
  const Index np = cfg.population_size ? cfg.population_size : 15 * dim;
  if (np < 4) throw InvalidInputError("differential_evolution: population too small");
  const Index max_gens = cfg.max_generations ? cfg.max_generations : 300 * dim;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  std::vector<Vector> pop(np);
  std::vector<double> fit(np);
  for (Index i = 0; i < np; ++i) pop[i] = detail::random_direction(dim, rng);
  detail::evaluate_block(f, pop, fit, cfg.threads);

  OptimizationResult res;
  res.seed = cfg.seed;
  res.evaluations = np;

  double best = fit[0];
  Index best_idx = 0;
  double worst = fit[0];
  for (Index i = 1; i < np; ++i) {
    if (fit[i] > best) { best = fit[i]; best_idx = i; }
    worst = std::min(worst, fit[i]);
  }
  if (best <= 1e-12 && worst <= 1e-12)
    throw NoControllableDirectionError(
        "differential_evolution: every sampled direction has zero objective");

  std::vector<Vector> trials(np);
  for (Index gen = 0; gen < max_gens; ++gen) {
    for (Index i = 0; i < np; ++i) {
      Index r1, r2, r3;
      do { r1 = static_cast<Index>(uni(rng) * np) % np; } while (r1 == i);
      do { r2 = static_cast<Index>(uni(rng) * np) % np; } while (r2 == i || r2 == r1);
      do { r3 = static_cast<Index>(uni(rng) * np) % np; } while (r3 == i || r3 == r1 || r3 == r2);
      Vector mutant(dim);
      for (Index d = 0; d < dim; ++d)
        mutant[d] = pop[r1][d] + cfg.mutation_weight * (pop[r2][d] - pop[r3][d]);
      const Index jrand = static_cast<Index>(uni(rng) * dim) % dim;
      Vector trial = pop[i];
      for (Index d = 0; d < dim; ++d)
        if (d == jrand || uni(rng) < cfg.crossover_rate) trial[d] = mutant[d];
      if (auto unit = project_to_sphere(trial))
        trials[i] = *unit;
      else
        trials[i] = detail::random_direction(dim, rng);
    }
    std::vector<double> trial_fit(np);
    detail::evaluate_block(f, trials, trial_fit, cfg.threads);
    res.evaluations += np;
    for (Index i = 0; i < np; ++i) {
      if (trial_fit[i] >= fit[i]) {
        pop[i] = trials[i];
        fit[i] = trial_fit[i];
        if (fit[i] > best) { best = fit[i]; best_idx = i; }
      }
    }
    res.generations = gen + 1;
    res.history.push_back(best);

    double mean = 0.0;
    for (double v : fit) mean += v;
    mean /= static_cast<double>(np);
    double var = 0.0;
    for (double v : fit) var += (v - mean) * (v - mean);
    if (std::sqrt(var / static_cast<double>(np)) < cfg.stall_tolerance) break;
  }

  res.best_b = pop[best_idx];
  res.best_value = best;
  return res;
}

inline OptimizationResult differential_evolution(const Matrix& a, const DEConfig& cfg) {
  const BrunovskyCache cache(a);
  return differential_evolution(
      [&cache](const Vector& b) { return objective(cache, b); }, a.rows(), cfg);
}

// Best-of over several DE runs with derived seeds.
inline OptimizationResult multi_start(const ObjectiveFn& f, Index dim, DEConfig cfg) {
  const Index starts = std::max<Index>(cfg.starts, 1);
  OptimizationResult best;
  Index total_evals = 0;
  for (Index s = 0; s < starts; ++s) {
    DEConfig run_cfg = cfg;
    run_cfg.seed = cfg.seed + s * 0x100000001b3ULL;
    OptimizationResult r = differential_evolution(f, dim, run_cfg);
    total_evals += r.evaluations;
    if (s == 0 || r.best_value > best.best_value) best = r;
  }
  best.evaluations = total_evals;
  best.seed = cfg.seed;
  return best;
}

inline bool commutes_and_orthogonal(const Matrix& a, const Matrix& r, double tol) {
  if (!a.square() || !r.square() || a.rows() != r.rows())
    throw DimensionError("commutes_and_orthogonal: dimension mismatch");
  const double comm = (a * r - r * a).frobenius_norm();
  if (comm > tol * a.frobenius_norm() * r.frobenius_norm()) return false;
  const Matrix gram_r = r * r.transpose() - Matrix::identity(r.rows());
  return gram_r.frobenius_norm() <= tol;
}

// {b} together with {R b} for each candidate symmetry, deduplicated.
// Every candidate must commute with A and be orthogonal.
inline std::vector<Vector> symmetry_orbit(const Matrix& a, const Vector& b,
                                          const std::vector<Matrix>& candidates,
                                          double tol = 1e-9) {
  std::vector<Vector> orbit{b};
  for (Index c = 0; c < candidates.size(); ++c) {
    if (!commutes_and_orthogonal(a, candidates[c], tol))
      throw InvalidSymmetryError("symmetry_orbit: candidate " + std::to_string(c) +
                                 " does not commute with A or is not orthogonal");
    const Vector rb = candidates[c] * b;
    bool dup = false;
    for (const Vector& existing : orbit) {
      double d = 0.0;
      for (Index i = 0; i < rb.size(); ++i)
        d += (rb[i] - existing[i]) * (rb[i] - existing[i]);
      if (std::sqrt(d) < 1e-8) { dup = true; break; }
    }
    if (!dup) orbit.push_back(rb);
  }
  return orbit;
}

// Orthogonal matrices commuting with the n=2 heat dynamics: -Id, the
// coordinate swap, and the negated swap.
inline std::vector<Matrix> heat2_symmetries() {
  return {Matrix{{-1.0, 0.0}, {0.0, -1.0}},
          Matrix{{0.0, 1.0}, {1.0, 0.0}},
          Matrix{{0.0, -1.0}, {-1.0, 0.0}}};
}

// Central-difference gradient of the objective with re-projection to the
// sphere after each perturbation. Diagnostics only; values get noisy near
// eigenvalue crossings.
inline Vector fd_gradient(const Matrix& a, const Vector& b, double eps = 1e-6) {
  if (eps <= 0.0) throw InvalidInputError("fd_gradient: eps must be positive");
  const BrunovskyCache cache(a);
  const Index n = b.size();
  Vector grad(n);
  for (Index i = 0; i < n; ++i) {
    Vector plus = b, minus = b;
    plus[i] += eps;
    minus[i] -= eps;
    const double fp = objective(cache, *project_to_sphere(plus));
    const double fm = objective(cache, *project_to_sphere(minus));
    grad[i] = (fp - fm) / (2.0 * eps);
  }
  return grad;
}

}  // namespace actopt
