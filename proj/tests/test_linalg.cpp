#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "streamrec/errors.hpp"
#include "streamrec/linalg.hpp"
#include "streamrec/quadrature.hpp"

using namespace streamrec;

namespace {

double residual_norm(const Matrix& m, std::span<const double> x, std::span<const double> rhs) {
  const Vector mx = m * x;
  return norm2(subtract(mx, rhs));
}

double eig_residual(const Matrix& m, const EigenDecomposition& e) {
  const std::size_t n = m.rows();
  Matrix lam(n, n);
  for (std::size_t i = 0; i < n; ++i) lam(i, i) = e.values[i];
  return frobenius_norm(m * e.vectors - e.vectors * lam);
}

double orthogonality_error(const Matrix& v) {
  Matrix g = transpose_times(v, v);
  add_diagonal(g, -1.0);
  return max_abs(g);
}

}  // namespace

TEST_CASE("cholesky solves small systems") {
  SUBCASE("identity") {
    const Vector x = cholesky_solve(Matrix::identity(3), Vector{1, 2, 3});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
    CHECK(x[2] == doctest::Approx(3.0));
  }
  SUBCASE("diagonal") {
    const Vector x = cholesky_solve(Matrix::diagonal(Vector{2, 5}), Vector{2, 10});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
  }
  SUBCASE("random spd 8x8") {
    testgen::Rng rng(11);
    const Matrix m = testgen::random_spd(rng, 8);
    const Vector rhs = testgen::random_vector(rng, 8);
    CHECK(residual_norm(m, cholesky_solve(m, rhs), rhs) <= 1e-9 * norm2(rhs));
  }
}

TEST_CASE("cholesky rejects indefinite and asymmetric input") {
  CHECK_THROWS_AS(Cholesky(Matrix::diagonal(Vector{1.0, -1.0})), NotPositiveDefinite);
  CHECK_THROWS_AS(Cholesky(Matrix::diagonal(Vector{1.0, 0.0})), NotPositiveDefinite);
  Matrix a(2, 2, 1.0);
  a(0, 1) = 2.0;
  CHECK_THROWS_AS(Cholesky{a}, std::invalid_argument);
}

TEST_CASE("property: cholesky residual on random spd matrices") {
  testgen::Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = testgen::pick(rng, 1, 64);
    const Matrix m = testgen::random_spd(rng, n);
    const Vector rhs = testgen::random_vector(rng, n);
    const Vector x = cholesky_solve(m, rhs);
    REQUIRE(residual_norm(m, x, rhs) <= 1e-9 * norm2(rhs));
  }
}

TEST_CASE("cholesky matrix right-hand side") {
  testgen::Rng rng(5);
  const Matrix m = testgen::random_spd(rng, 6);
  const Matrix rhs = testgen::random_matrix(rng, 6, 3);
  const Matrix x = cholesky_solve(m, rhs);
  CHECK(max_abs(m * x - rhs) <= 1e-9 * max_abs(rhs));
}

TEST_CASE("jacobi on closed-form cases") {
  SUBCASE("diagonal") {
    const auto e = jacobi_eigh(Matrix::diagonal(Vector{3, 1, 2}));
    CHECK(e.values[0] == doctest::Approx(3.0));
    CHECK(e.values[1] == doctest::Approx(2.0));
    CHECK(e.values[2] == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(2, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(1, 2)) == doctest::Approx(1.0));
  }
  SUBCASE("swap") {
    Matrix m(2, 2);
    m(0, 1) = m(1, 0) = 1.0;
    const auto e = jacobi_eigh(m);
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(-1.0));
  }
  SUBCASE("random 16x16") {
    testgen::Rng rng(16);
    const Matrix m = testgen::random_symmetric(rng, 16);
    const auto e = jacobi_eigh(m);
    CHECK(eig_residual(m, e) <= 1e-9 * frobenius_norm(m));
    CHECK(orthogonality_error(e.vectors) <= 1e-10);
    for (std::size_t i = 1; i < 16; ++i) CHECK(e.values[i - 1] >= e.values[i]);
  }
}

TEST_CASE("property: jacobi matches characteristic roots for 2x2 and 3x3") {
  testgen::Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix m2 = testgen::random_symmetric(rng, 2);
    const double tr = m2(0, 0) + m2(1, 1);
    const double det = m2(0, 0) * m2(1, 1) - m2(0, 1) * m2(1, 0);
    const double disc = std::sqrt(tr * tr / 4.0 - det);
    const auto e2 = jacobi_eigh(m2);
    REQUIRE(std::abs(e2.values[0] - (tr / 2.0 + disc)) <= 1e-10);
    REQUIRE(std::abs(e2.values[1] - (tr / 2.0 - disc)) <= 1e-10);

    // 3x3 by the trigonometric formula
    const Matrix a = testgen::random_symmetric(rng, 3);
    const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
    const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
    const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) +
                      2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    Matrix b = a;
    add_diagonal(b, -q);
    b *= 1.0 / p;
    const double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                        b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                        b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    const double r = std::clamp(detb / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double l1 = q + 2.0 * p * std::cos(phi);
    const double l3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double l2 = 3.0 * q - l1 - l3;
    const auto e3 = jacobi_eigh(a);
    REQUIRE(std::abs(e3.values[0] - l1) <= 1e-10);
    REQUIRE(std::abs(e3.values[1] - l2) <= 1e-10);
    REQUIRE(std::abs(e3.values[2] - l3) <= 1e-10);
  }
}

TEST_CASE("jacobi on a larger matrix") {
  testgen::Rng rng(3);
  const Matrix m = testgen::random_symmetric(rng, 120);
  const auto e = jacobi_eigh(m);
  CHECK(eig_residual(m, e) <= 1e-9 * frobenius_norm(m));
  CHECK(orthogonality_error(e.vectors) <= 1e-10);
}

TEST_CASE("jacobi rejects asymmetric input") {
  Matrix m(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(jacobi_eigh(m), std::invalid_argument);
}

TEST_CASE("spectral norm") {
  CHECK(spectral_norm(Matrix(3, 4)) == 0.0);
  CHECK(spectral_norm(Matrix::diagonal(Vector{3.0, -4.0})) == doctest::Approx(4.0).epsilon(1e-8));
  testgen::Rng rng(10);
  const Matrix m = testgen::random_matrix(rng, 10, 6);
  const auto e = jacobi_eigh(transpose_times(m, m));
  CHECK(std::abs(spectral_norm(m) - std::sqrt(e.values[0])) <= 1e-7 * std::sqrt(e.values[0]));
}

TEST_CASE("gauss-legendre exactness") {
  CHECK(gauss_legendre(0, 1, 4).integrate([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gauss_legendre(0, 1, 2).integrate([](double t) { return t * t * t; }) ==
        doctest::Approx(0.25).epsilon(1e-14));
  const auto cos_rule = composite_gauss_legendre(0.0, 1.0, 4, 8);
  CHECK(std::abs(cos_rule.integrate([](double t) { return std::cos(std::numbers::pi * t / 2.0); }) -
                 2.0 / std::numbers::pi) <= 1e-12);
}

TEST_CASE("property: gauss-legendre integrates degree 2n-1 exactly") {
  testgen::Rng rng(8);
  for (std::size_t order = 2; order <= 32; ++order) {
    const double a = testgen::uniform(rng, -2.0, 0.0), b = a + testgen::uniform(rng, 0.1, 3.0);
    const std::size_t deg = 2 * order - 1;
    // integrate t^deg and t^(deg-1) against closed forms, relative to the magnitude
    for (std::size_t p : {deg, deg - 1}) {
      const auto rule = gauss_legendre(a, b, order);
      const double got = rule.integrate([p](double t) { return std::pow(t, static_cast<double>(p)); });
      const double exact = (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / static_cast<double>(p + 1);
      const double scale = std::max({1.0, std::pow(std::abs(a), p + 1.0), std::pow(std::abs(b), p + 1.0)});
      REQUIRE(std::abs(got - exact) <= 1e-13 * scale);
    }
    const auto rule = gauss_legendre(a, b, order);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      REQUIRE(rule.weights[i] > 0.0);
      if (i > 0) REQUIRE(rule.nodes[i] > rule.nodes[i - 1]);
      sum += rule.weights[i];
    }
    REQUIRE(std::abs(sum - (b - a)) <= 1e-12);
  }
}

TEST_CASE("composite rule converges as panels double") {
  auto f = [](double t) { return std::exp(std::sin(3.0 * t)); };
  const double ref = composite_gauss_legendre(0.0, 2.0, 64, 20).integrate(f);
  double prev = std::abs(composite_gauss_legendre(0.0, 2.0, 2, 3).integrate(f) - ref);
  for (std::size_t panels = 4; panels <= 16; panels *= 2) {
    const double err = std::abs(composite_gauss_legendre(0.0, 2.0, panels, 3).integrate(f) - ref);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("composite rule respects breakpoints and width") {
  const std::vector<double> cuts{0.0, 0.3, 1.0};
  const auto rule = composite_gauss_legendre(cuts, 4, 0.25);
  // panels: [0,0.3] split into 2, [0.3,1] into 3
  CHECK(rule.size() == 4u * 5u);
  double sum = 0.0;
  for (double w : rule.weights) sum += w;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  // a kink at 0.3 is integrated exactly
  const double got = rule.integrate([](double t) { return std::abs(t - 0.3); });
  CHECK(got == doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-14));
}

TEST_CASE("quadrature preconditions") {
  CHECK_THROWS_AS(gauss_legendre(1.0, 0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(0.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(gauss_legendre(0.0, 1.0, 33), std::invalid_argument);
}
