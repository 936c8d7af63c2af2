#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ssf/error.hpp"
#include "ssf/linalg.hpp"
#include "ssf/random_models.hpp"

using namespace ssf;
using linalg::cd;
using linalg::HermitianMatrix;
using linalg::Matrix;

namespace {

Matrix diag(std::initializer_list<double> v) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) m(k, k) = x, ++k;
  return m;
}

}  // namespace

TEST_CASE("Hermitian validation rejects asymmetric input") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(HermitianMatrix{m}, Error);
  try {
    HermitianMatrix bad{m};
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotHermitian);
  }
}

TEST_CASE("eigenphases of a diagonal unitary") {
  Matrix w = Matrix::Identity(3, 3);
  w(0, 0) = std::polar(1.0, 0.5);
  w(1, 1) = std::polar(1.0, -0.5);  // 2pi - 0.5
  const auto ph = linalg::eigenphases(linalg::UnitaryMatrix(w), 1e-9);
  REQUIRE(ph.size() == 2);
  CHECK(ph[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ph[1] == doctest::Approx(2 * std::numbers::pi - 0.5).epsilon(1e-12));
}

TEST_CASE("xi projection and its kernel guard") {
  const auto p = linalg::xi_projection(HermitianMatrix(diag({-1.0, 2.0, -3.0})), 1e-9);
  CHECK(p.rank() == 2);
  try {
    (void)linalg::xi_projection(HermitianMatrix(diag({-1.0, 1e-12})), 1e-9);
    FAIL("expected KernelAtZero");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::KernelAtZero);
  }
}

TEST_CASE("index of nested and rotated projections") {
  const linalg::ProjectionMatrix p(diag({1, 1, 0}));
  const linalg::ProjectionMatrix q(diag({1, 0, 0}));
  CHECK(linalg::fredholm_index(p, q) == 1);
  CHECK(linalg::fredholm_index(q, p) == -1);
  CHECK(linalg::fredholm_index(p, p) == 0);

  // A rotation by less than pi/2 keeps the index at zero.
  Matrix r = Matrix::Zero(2, 2);
  const double a = 0.4;
  r(0, 0) = std::cos(a) * std::cos(a);
  r(0, 1) = r(1, 0) = std::cos(a) * std::sin(a);
  r(1, 1) = std::sin(a) * std::sin(a);
  CHECK(linalg::fredholm_index(linalg::ProjectionMatrix(diag({1, 0})), linalg::ProjectionMatrix(r)) == 0);
}

TEST_CASE("index equals trace of the difference on random projections") {
  random::Rng rng(11);
  for (int i = 0; i < 40; ++i) {
    const auto p = random::projection(6, i % 7, rng);
    const auto q = random::projection(6, (3 * i) % 7, rng);
    CHECK(linalg::fredholm_index(p, q) == (i % 7) - (3 * i) % 7);
  }
}

TEST_CASE("functional calculus and determinant") {
  random::Rng rng(3);
  const HermitianMatrix h = random::hermitian(5, rng);
  const Matrix sq = linalg::apply_scalar_function(h, [](double x) { return x * x; }).matrix();
  CHECK(linalg::max_abs(sq - h.matrix() * h.matrix()) < 1e-12);
  CHECK_THROWS_AS(linalg::apply_scalar_function(h, [](double) { return std::nan(""); }), Error);

  const Matrix m = random::gaussian(4, 4, rng);
  CHECK(std::abs(linalg::det_complex(m) - m.determinant()) < 1e-12 * std::max(1.0, std::abs(m.determinant())));
}

TEST_CASE("pencil zeros of a diagonal pencil") {
  // M + sB with M = diag(-1, 2, 0.5), B = diag(1, 1, 0): zeros at s = 1 and s = -2.
  const HermitianMatrix m(diag({-1.0, 2.0, 0.5}));
  const HermitianMatrix b(diag({1.0, 1.0, 0.0}));
  const double inf = std::numeric_limits<double>::infinity();
  const auto all = linalg::pencil_real_zeros(m, b, -inf, inf);
  REQUIRE(all.size() == 2);
  CHECK(all[0].s == doctest::Approx(-2.0));
  CHECK(all[1].s == doctest::Approx(1.0));
  const auto half_open = linalg::pencil_real_zeros(m, b, 0.0, 1.0);
  REQUIRE(half_open.size() == 1);
  CHECK(half_open[0].multiplicity == 1);
  CHECK(linalg::pencil_real_zeros(m, b, 1.0, 3.0).empty());
}

TEST_CASE("Lidski distance and Schatten norms on a diagonal pair") {
  const HermitianMatrix a(diag({3.0, -1.0}));
  const HermitianMatrix b(diag({1.0, -2.0}));
  const auto sa = linalg::eigenvalue_sequences(a);
  const auto sb = linalg::eigenvalue_sequences(b);
  CHECK(linalg::sequence_distance(sa, sb, 1.0) == doctest::Approx(3.0));
  CHECK(linalg::schatten_norm(a - b, 1.0) == doctest::Approx(3.0));
  CHECK(linalg::schatten_norm(a - b, std::numeric_limits<double>::infinity()) == doctest::Approx(2.0));
}
