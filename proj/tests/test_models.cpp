#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ssf/error.hpp"
#include "ssf/models.hpp"
#include "ssf/random_models.hpp"

using namespace ssf;
using linalg::cd;
using linalg::HermitianMatrix;
using linalg::Matrix;

namespace {

// (H_N - z)^{-1} e_m on sites 1..N of the truncated lattice, Thomas algorithm.
std::vector<cd> truncated_column(long n_sites, long m, cd z) {
  const std::size_t n = static_cast<std::size_t>(n_sites);
  std::vector<cd> c(n), d(n), x(n);
  // Tridiagonal with diagonal -z and off-diagonals 1.
  cd denom = -z;
  c[0] = 1.0 / denom;
  d[0] = (m == 1 ? 1.0 : 0.0) / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = -z - c[i - 1];
    c[i] = 1.0 / denom;
    d[i] = ((static_cast<long>(i) + 1 == m ? 1.0 : 0.0) - d[i - 1]) / denom;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i > 0; --i) x[i - 1] = d[i - 1] - c[i - 1] * x[i];
  return x;
}

Matrix dense_resolvent(const Matrix& h, cd z) {
  return (h - z * Matrix::Identity(h.rows(), h.cols())).inverse();
}

}  // namespace

TEST_CASE("lattice Green's function against a truncated lattice") {
  for (cd z : {cd(0.3, 0.2), cd(-1.7, 0.05), cd(2.5, 0.1), cd(-0.2, 1.5)}) {
    for (long m : {1L, 2L, 5L}) {
      const auto col = truncated_column(60000, m, z);
      for (long n : {1L, 3L, 4L, 7L}) {
        CHECK(std::abs(models::lattice_green(n, m, z) - col[static_cast<std::size_t>(n - 1)]) < 1e-9);
      }
    }
  }
}

TEST_CASE("lattice boundary values") {
  for (double lambda : {-1.9, -0.5, 0.0, 0.7, 1.95}) {
    // Closed form of the (1,1) entry on the band.
    const cd g11(-lambda / 2.0, std::sqrt(4.0 - lambda * lambda) / 2.0);
    CHECK(std::abs(models::lattice_green_boundary(1, 1, lambda) - g11) < 1e-12);
    CHECK(std::abs(models::lattice_green_boundary(2, 3, lambda) - models::lattice_green(2, 3, cd(lambda, 1e-10))) <
          1e-8);
  }
  // Off the band the boundary value is real.
  CHECK(std::abs(models::lattice_green_boundary(1, 1, 3.0).imag()) < 1e-15);
  CHECK_THROWS_AS(models::lattice_green_boundary(1, 1, 2.0), Error);
  CHECK(std::abs(models::lattice_zeta(cd(0.4, 0.1))) < 1.0);
}

TEST_CASE("lattice model T against the truncated dense sandwich") {
  Matrix w(2, 2);
  w << cd(1.0, 0.0), cd(0.3, 0.1), cd(0.2, 0.0), cd(0.7, -0.2);
  Matrix j = Matrix::Identity(2, 2);
  j(1, 1) = -0.6;
  const models::HalfLineLaplacianModel model({1, 3}, w, models::Coupling(HermitianMatrix(j)));
  const long n = 3000;
  const Matrix g = model.truncated_G(n);
  for (cd z : {cd(0.2, 0.3), cd(-1.2, 0.1)}) {
    Matrix col_block(n, 3);
    for (long s = 1; s <= 3; ++s) {
      const auto col = truncated_column(n, s, z);
      for (long i = 0; i < n; ++i) col_block(i, s - 1) = col[static_cast<std::size_t>(i)];
    }
    // G only touches sites 1..3, so G R G* needs only those columns.
    const Matrix t = g * col_block * g.leftCols(3).adjoint();
    CHECK(linalg::max_abs(t - model.T(z)) < 1e-9);
  }
  const auto ab = models::AB_boundary(model, 0.4);
  CHECK(linalg::max_abs(ab.A.matrix() + cd(0, 1) * ab.B.matrix() - model.boundary_T(0.4)) < 1e-12);
  CHECK(std::abs(model.spectrum_info().lower() + 2.0) < 1e-15);
}

TEST_CASE("lattice model validation") {
  const models::Coupling c(HermitianMatrix(Matrix::Identity(2, 2)));
  CHECK_THROWS_AS(models::HalfLineLaplacianModel({1, 1}, Matrix::Identity(2, 2), c), Error);
  CHECK_THROWS_AS(models::HalfLineLaplacianModel({0, 2}, Matrix::Identity(2, 2), c), Error);
  CHECK_THROWS_AS(models::HalfLineLaplacianModel({1, 2, 3}, Matrix::Identity(2, 2), c), Error);
}

TEST_CASE("scalar lattice realisations of boundary data") {
  Matrix w(1, 1), j(1, 1);
  w(0, 0) = std::sqrt(std::sqrt(5.0) / 2.0);
  j(0, 0) = 1.0;
  const models::HalfLineLaplacianModel model({1}, w, models::Coupling(HermitianMatrix(j)));
  const auto ab = models::AB_boundary(model, -2.0 / std::sqrt(5.0));
  CHECK(ab.A.matrix()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ab.B.matrix()(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dense model resolvent, M and boundary values") {
  random::Rng rng(17);
  for (int i = 0; i < 10; ++i) {
    const auto model = random::dense_model(5, 2, random::Signature::Mixed, rng);
    CHECK(model->resolvent_identity_residual() < 1e-9);
    const Matrix h = model->H0().matrix() + model->G().adjoint() * model->coupling().J().matrix() * model->G();
    CHECK(linalg::max_abs(h - model->H().matrix()) < 1e-12);

    const cd z(0.3, 0.7);
    const Matrix t = model->G() * dense_resolvent(model->H0().matrix(), z) * model->G().adjoint();
    CHECK(linalg::max_abs(t - model->T(z)) < 1e-10);

    const Matrix m = (h - std::conj(z) * Matrix::Identity(5, 5)) * dense_resolvent(h, z) *
                     (model->H0().matrix() - z * Matrix::Identity(5, 5)) *
                     dense_resolvent(model->H0().matrix(), std::conj(z));
    CHECK(linalg::max_abs(m - model->M_of_z(z).matrix()) < 1e-10);
    CHECK(linalg::max_abs(model->M_factorized(z) - m) < 1e-10);

    const double e0 = model->H0_eigenvalues()(2);
    try {
      (void)model->boundary_T(e0);
      FAIL("expected BoundaryUndefined");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BoundaryUndefined);
    }
    try {
      (void)model->M_of_z(cd(model->H_eigenvalues()(0), 0.0));
      FAIL("expected PoleHit");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::PoleHit);
    }
  }
}

TEST_CASE("coupling must be invertible") {
  Matrix j = Matrix::Zero(2, 2);
  j(0, 0) = 1.0;
  try {
    models::Coupling c{HermitianMatrix(j)};
    FAIL("expected InvalidArgument");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("Moebius maps") {
  const auto f = models::MoebiusMap::affine(2.0, 0.3);
  CHECK(f(1.0) == doctest::Approx(2.3));
  CHECK(f.preimage(2.3) == doctest::Approx(1.0));
  const auto g = models::MoebiusMap::inverse_shift(-5.0);
  CHECK(g(-4.0) == doctest::Approx(-1.0));
  CHECK(g.derivative(-4.0) == doctest::Approx(1.0));
  CHECK(g.preimage(cd(0.1, 0.2)).imag() > 0.0);
  CHECK(std::abs(g(g.preimage(cd(-0.3, 0.4)).real())) > 0.0);
}

TEST_CASE("dense pushforward reproduces f(H0) and f(H)") {
  random::Rng rng(23);
  const auto model = random::dense_model(4, 2, random::Signature::Mixed, rng, 0.5);
  const models::ModelPtr base = model;

  const auto affine = models::moebius_pushforward(base, models::MoebiusMap::affine(2.0, 0.3));
  const auto* pa = affine.model->as_dense();
  REQUIRE(pa != nullptr);
  CHECK(affine.identity_residual < 1e-10);
  const Matrix id = Matrix::Identity(4, 4);
  CHECK(linalg::max_abs(pa->H0().matrix() - (2.0 * model->H0().matrix() + 0.3 * id)) < 1e-12);
  CHECK(linalg::max_abs(pa->H().matrix() - (2.0 * model->H().matrix() + 0.3 * id)) < 1e-10);

  const auto inv = models::moebius_pushforward(base, models::MoebiusMap::inverse_shift(-8.0));
  const auto* pi = inv.model->as_dense();
  REQUIRE(pi != nullptr);
  CHECK(inv.identity_residual < 1e-10);
  const Matrix fh = -(model->H().matrix() + 8.0 * id).inverse();
  CHECK(linalg::max_abs(pi->H().matrix() - fh) < 1e-10);

  try {
    (void)models::moebius_pushforward(base, models::MoebiusMap::affine(-1.0, 0.0));
    FAIL("expected AdmissibilityViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AdmissibilityViolation);
  }
  try {
    (void)models::moebius_pushforward(base, models::MoebiusMap::inverse_shift(model->H0_eigenvalues()(1)));
    FAIL("expected AdmissibilityViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AdmissibilityViolation);
  }
}

TEST_CASE("lattice pushforward keeps the T identity") {
  Matrix w(1, 1), j(1, 1);
  w(0, 0) = 0.8;
  j(0, 0) = 1.0;
  const models::ModelPtr base =
      std::make_shared<models::HalfLineLaplacianModel>(std::vector<long>{1}, w, models::Coupling(HermitianMatrix(j)));
  const auto f = models::MoebiusMap::affine(2.0, 0.3);
  const auto pushed = models::moebius_pushforward(base, f);
  CHECK(pushed.identity_residual < 1e-10);
  const cd wz(0.9, 0.4);
  CHECK(linalg::max_abs(pushed.model->T(wz) - base->T(f.preimage(wz))) < 1e-12);
}

TEST_CASE("condition a1") {
  const auto ok = models::validate_condition_a1(models::MoebiusMap::inverse_shift(-5.0), {-2.0, 2.0}, 0.4);
  CHECK(ok.pass);
  CHECK(ok.derivative_positive);
  const auto bad = models::validate_condition_a1(models::MoebiusMap::inverse_shift(0.0), {-2.0, 2.0}, 0.4);
  CHECK_FALSE(bad.pass);
  CHECK_FALSE(bad.violations.empty());
}
