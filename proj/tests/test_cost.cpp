#include <catch2/catch_amalgamated.hpp>

#include "actopt/cost.hpp"
#include "actopt/systems.hpp"
#include "helpers.hpp"

using namespace actopt;
using Catch::Approx;

namespace {
const Matrix kHeat{{-2.0, 1.0}, {1.0, -2.0}};
}

TEST_CASE("expm basics") {
  CHECK((expm(Matrix(3, 3)) - Matrix::identity(3)).frobenius_norm() <= 1e-14);

  Matrix d(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  const Matrix ed = expm(d);
  CHECK(ed(0, 0) == Approx(std::exp(1.0)).epsilon(1e-13));
  CHECK(ed(1, 1) == Approx(std::exp(2.0)).epsilon(1e-13));
  CHECK(ed(0, 1) == 0.0);

  const Matrix nil = expm(Matrix{{0.0, 1.0}, {0.0, 0.0}});
  CHECK(nil(0, 0) == Approx(1.0));
  CHECK(nil(0, 1) == Approx(1.0));
  CHECK(nil(1, 0) == Approx(0.0).margin(1e-15));
  CHECK(nil(1, 1) == Approx(1.0));
}

TEST_CASE("expm semigroup property under scaling and squaring") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = testing::random_matrix(4, rng);
    const Matrix whole = expm(a);
    const Matrix half = expm(a * 0.5);
    CHECK((whole - half * half).frobenius_norm() <= 1e-11 * whole.frobenius_norm());
  }
}

TEST_CASE("expm rejects extreme norms") {
  Matrix big(2, 2);
  big(0, 0) = 1e9;
  CHECK_THROWS_AS(expm(big), NumericRangeError);
}

TEST_CASE("gramian for A = 0 integrates b b^T") {
  const Matrix w1 = gramian(Matrix(2, 2), {1.0, 0.0}, 1.0);
  CHECK(w1(0, 0) == Approx(1.0).margin(1e-12));
  CHECK(w1(0, 1) == Approx(0.0).margin(1e-14));
  CHECK(w1(1, 1) == Approx(0.0).margin(1e-14));

  const Matrix w2 = gramian(Matrix(2, 2), {1.0, 0.0}, 2.0);
  CHECK(w2(0, 0) == Approx(2.0).margin(1e-12));

  CHECK_THROWS_AS(gramian(Matrix(2, 2), {1.0, 0.0}, 0.0), InvalidInputError);
}

TEST_CASE("gramian matches frozen quadrature values (heat, b = e1, T = 1)") {
  // Computed with adaptive quadrature of e^{As} b b^T e^{A^T s} before
  // the block-exponential path existed.
  const Matrix w = gramian(kHeat, {1.0, 0.0}, 1.0);
  CHECK(w(0, 0) == Approx(0.27235702).margin(1e-7));
  CHECK(w(0, 1) == Approx(0.06651970).margin(1e-7));
  CHECK(w(1, 1) == Approx(0.02693593).margin(1e-7));

  const Matrix comp = companion(char_poly(kHeat));
  const Matrix wc = gramian(comp, {0.0, 1.0}, 1.0);
  CHECK(wc(0, 0) == Approx(0.02693593).margin(1e-7));
  CHECK(wc(0, 1) == Approx(0.01264784).margin(1e-7));
  CHECK(wc(1, 1) == Approx(0.11402192).margin(1e-7));
}

TEST_CASE("block-exponential Gramian agrees with Simpson quadrature") {
  std::mt19937_64 rng(37);
  for (Index n : {2, 3, 4}) {
    for (double t : {0.1, 1.0}) {
      const Matrix heat = dirichlet_laplacian(n);
      const Matrix adv = advection_diffusion(n, 1);
      for (const Matrix& a : {heat, adv}) {
        const Vector b = testing::random_unit(n, rng);
        const Matrix w1 = gramian(a, b, t);
        const Matrix w2 = gramian_quadrature(a, b, t);
        CHECK((w1 - w2).frobenius_norm() <= 1e-8 * w1.frobenius_norm());
      }
    }
  }
}

TEST_CASE("Gramian grows monotonically in T") {
  std::mt19937_64 rng(39);
  const Vector b = testing::random_unit(3, rng);
  const Matrix a = dirichlet_laplacian(3);
  const Matrix diff = gramian(a, b, 1.5) - gramian(a, b, 0.5);
  CHECK(jacobi_spectrum(diff).front() >= -1e-12);
}

TEST_CASE("exact_cost on frozen oracle values") {
  CHECK(exact_cost(kHeat, {1.0, 0.0}, 1.0) == Approx(2.004895291479292).epsilon(1e-8));
  CHECK(exact_cost(kHeat, {1.0, 0.0}, 2.0) == Approx(0.561939703175156).epsilon(1e-8));
  // larger horizon cannot increase the minimal-norm cost
  CHECK(exact_cost(kHeat, {1.0, 0.0}, 2.0) < exact_cost(kHeat, {1.0, 0.0}, 1.0));
}

TEST_CASE("exact_cost halves when b doubles") {
  std::mt19937_64 rng(43);
  const auto [a, b] = testing::random_cyclic_pair(3, rng);
  Vector doubled = b;
  for (double& x : doubled) x *= 2.0;
  CHECK(exact_cost(a, doubled, 1.0) ==
        Approx(exact_cost(a, b, 1.0) / 2.0).epsilon(1e-9));
}

TEST_CASE("exact_cost error paths") {
  const double s = std::sqrt(2.0) / 2.0;
  CHECK_THROWS_AS(exact_cost(kHeat, {s, s}, 1.0), NonControllableError);
  CHECK_THROWS_AS(exact_cost(kHeat, {1.0, 0.0}, -1.0), InvalidInputError);
}

TEST_CASE("kappa depends only on the characteristic polynomial") {
  CHECK(kappa(kHeat, 1.0) == Approx(4.050946185468253).epsilon(1e-8));

  std::mt19937_64 rng(47);
  const Matrix q = testing::random_orthogonal(2, rng);
  CHECK(kappa(q * kHeat * q.transpose(), 1.0) ==
        Approx(kappa(kHeat, 1.0)).epsilon(1e-10));

  CHECK(kappa(kHeat, 2.0) < kappa(kHeat, 1.0));
  CHECK(kappa(kHeat, 1.0) < kappa(kHeat, 0.5));
}

TEST_CASE("factorization_report") {
  // Companion pair: P = Id, so the bound is attained exactly.
  const Matrix comp = companion(char_poly(kHeat));
  const CostReport triv = factorization_report(comp, {0.0, 1.0}, 1.0);
  CHECK(triv.inverse_norm == Approx(1.0).margin(1e-10));
  CHECK(triv.ratio == Approx(1.0).margin(1e-8));

  const CostReport rep = factorization_report(kHeat, {1.0, 0.0}, 1.0);
  CHECK(rep.ratio <= 1.0 + 1e-4);
  CHECK(rep.exact_cost <= rep.upper_bound * (1.0 + 1e-4));
}

TEST_CASE("blowup_exponent") {
  std::vector<double> grid;
  for (int k = 0; k < 8; ++k)
    grid.push_back(1e-3 * std::pow(10.0, k / 7.0));
  const double slope2 = blowup_exponent(kHeat, grid);
  CHECK(slope2 == Approx(-1.5).margin(0.15));

  CHECK_THROWS_AS(blowup_exponent(kHeat, {1.0, 1.0, 1.0, 1.0}), InvalidInputError);
  CHECK_THROWS_AS(blowup_exponent(kHeat, {0.5, 1.0}), InvalidInputError);
}
