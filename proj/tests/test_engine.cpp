#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ssf/checks.hpp"
#include "ssf/engine.hpp"
#include "ssf/error.hpp"
#include "ssf/random_models.hpp"

using namespace ssf;
using linalg::cd;
using linalg::HermitianMatrix;
using linalg::Matrix;

namespace {

constexpr double kPi = std::numbers::pi;

Matrix scalar(double x) {
  Matrix m(1, 1);
  m(0, 0) = x;
  return m;
}

// For scalar data D(z) = 1 + j T(z) never crosses the real axis in the upper
// half-plane, so the principal argument is the continuous branch.
double scalar_xi_oracle(double a, double b, double j) { return std::atan2(j * b, 1.0 + j * a) / kPi; }

// rank E_{H0}(-inf, lambda) - rank E_H(-inf, lambda), straight from Eigen.
int count_oracle(const Matrix& h0, const Matrix& h, double lambda) {
  const Eigen::SelfAdjointEigenSolver<Matrix> e0(h0), e1(h);
  return static_cast<int>((e0.eigenvalues().array() < lambda).count() -
                          (e1.eigenvalues().array() < lambda).count());
}

Matrix s_oracle(const engine::BoundaryData& d) {
  const cd i(0, 1);
  const Matrix base = d.J_inv.matrix() + d.A.matrix();
  return (base - i * d.B.matrix()) * (base + i * d.B.matrix()).inverse();
}

std::shared_ptr<models::HalfLineLaplacianModel> lattice(double w, double j) {
  return std::make_shared<models::HalfLineLaplacianModel>(std::vector<long>{1}, scalar(w),
                                                          models::Coupling(HermitianMatrix(scalar(j))));
}

}  // namespace

TEST_CASE("scalar boundary data: closed forms by every route") {
  struct Case {
    double a, b, j;
  };
  for (const Case& c : {Case{0, 1, 1}, Case{0, 1, -1}, Case{0.5, 1, 1}, Case{-0.3, 0.4, 2.0}, Case{0.2, 2.0, -0.7}}) {
    const auto d = engine::make_boundary_data(scalar(c.a), scalar(c.b), scalar(c.j));
    const double expected = scalar_xi_oracle(c.a, c.b, c.j);
    CHECK(engine::ssf_from_mu(engine::mu_via_index(d)) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(engine::ssf_index_integral(d) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(engine::birman_krein_defect(d) < 1e-12);
    CHECK(linalg::max_abs(engine::scattering_matrix(d).matrix() - s_oracle(d)) < 1e-12);
  }
  CHECK(scalar_xi_oracle(0, 1, 1) == doctest::Approx(0.25));
  CHECK(scalar_xi_oracle(0, 1, -1) == doctest::Approx(-0.25));
  CHECK(scalar_xi_oracle(0.5, 1, 1) == doctest::Approx(0.187167).epsilon(1e-6));
}

TEST_CASE("mu of the scalar (0, 1, 1) data") {
  const auto d = engine::make_boundary_data(scalar(0), scalar(1), scalar(1));
  const auto mu = engine::mu_via_index(d);
  // S = (1 - i)/(1 + i) = -i.
  REQUIRE(mu.step.jumps().size() == 1);
  CHECK(mu.step.jumps()[0].theta == doctest::Approx(3 * kPi / 2));
  CHECK(mu.step.jumps()[0].m == 1);
  CHECK(mu.step.tail() == -1);

  // Same thing on the lattice at lambda = 0 with the flow.
  const auto flow = engine::mu_via_flow(*lattice(1.0, 1.0), 0.0);
  CHECK(flow.step.equals(mu.step, 1e-8));
}

TEST_CASE("zero coupling strength gives the zero function") {
  const models::DenseModel model(HermitianMatrix(Matrix::Identity(3, 3)), Matrix::Zero(1, 3),
                                 models::Coupling(HermitianMatrix(scalar(1.0))));
  for (auto mu : {engine::mu_via_index(model, 0.3), engine::mu_via_flow(model, 0.3)}) {
    CHECK(mu.step.jumps().empty());
    CHECK(mu.step.tail() == 0);
  }
  const auto trace = engine::determinant_trace(model, 0.3);
  for (const auto& row : trace.rows) CHECK(row.arg == 0.0);
}

TEST_CASE("dense gap example") {
  Matrix h0 = Matrix::Zero(2, 2);
  h0(1, 1) = 2.0;
  const models::DenseModel model(HermitianMatrix(h0), Matrix::Identity(2, 2),
                                 models::Coupling(HermitianMatrix(Matrix::Identity(2, 2))));
  const auto mu = engine::mu_via_flow(model, 0.5);
  CHECK(mu.step.jumps().empty());
  CHECK(mu.step.tail() == -1);
  CHECK(engine::ssf_from_mu(mu) == doctest::Approx(1.0));
  CHECK(engine::ssf_via_determinant(model, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(engine::counting_ssf_oracle(model.H0(), model.H(), 0.5) == 1);
  try {
    (void)engine::mu_via_flow(model, 0.0);
    FAIL("expected BoundaryUndefined");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BoundaryUndefined);
  }
}

TEST_CASE("dense models: every route matches eigenvalue counting") {
  random::Rng rng(101);
  for (int i = 0; i < 15; ++i) {
    const auto model = random::dense_model(2 + i % 7, 1 + i % 3, random::Signature::Mixed, rng);
    for (double lambda : random::gap_points(*model)) {
      const int oracle = count_oracle(model->H0().matrix(), model->H().matrix(), lambda);
      CHECK(engine::counting_ssf_oracle(model->H0(), model->H(), lambda) == oracle);
      CHECK(std::abs(engine::ssf_via_determinant(*model, lambda) - oracle) < 1e-6);
      CHECK(engine::ssf_from_mu(engine::mu_via_flow(*model, lambda)) == doctest::Approx(oracle));
      CHECK(engine::ssf_index_integral(*model, lambda) == doctest::Approx(oracle));
      CHECK(engine::mu_via_index(*model, lambda).step.equals(engine::mu_via_flow(*model, lambda).step, 1e-8));
    }
  }
}

TEST_CASE("lattice: determinant, index integral and Birman-Krein agree") {
  random::Rng rng(7);
  const auto model = random::lattice_model(2, random::Signature::Mixed, rng);
  for (double lambda : {-1.3, -0.2, 0.6, 1.7}) {
    const auto d = engine::boundary_data(*model, lambda);
    const Matrix s = s_oracle(d);
    const double xi = engine::ssf_index_integral(*model, lambda);
    CHECK(std::abs(s.determinant() - std::polar(1.0, -2 * kPi * xi)) < 1e-9);
    CHECK(engine::ssf_via_determinant(*model, lambda) == doctest::Approx(xi).epsilon(1e-9));
    const auto mu = engine::mu_both(*model, lambda);
    CHECK(engine::ssf_from_mu(mu.first) == doctest::Approx(xi).epsilon(1e-9));
    CHECK(mu.first.step.is_non_increasing());
  }
}

TEST_CASE("sign-definite couplings") {
  for (double lambda : {-1.5, 0.1, 1.2}) {
    const auto pos = engine::mu_via_flow(*lattice(0.9, 1.0), lambda);
    CHECK(pos.step.max_value() <= 0);
    CHECK(engine::ssf_via_determinant(*lattice(0.9, 1.0), lambda) >= -1e-12);
    const auto neg = engine::mu_via_flow(*lattice(0.9, -1.0), lambda);
    CHECK(neg.step.min_value() >= 0);
    CHECK(engine::ssf_via_determinant(*lattice(0.9, -1.0), lambda) <= 1e-12);
  }
}

TEST_CASE("perturbation determinant and its trace") {
  const auto model = lattice(1.0, 1.0);
  const cd z(0.2, 0.5);
  const Matrix t = model->T(z);
  CHECK(std::abs(engine::perturbation_determinant(*model, z) - (1.0 + t(0, 0))) < 1e-14);

  const auto trace = engine::determinant_trace(*model, 0.0);
  REQUIRE(trace.rows.size() > 2);
  CHECK(std::abs(trace.rows.front().D - 1.0) < 1e-6);
  CHECK(trace.rows.back().y == 0.0);
  CHECK(trace.xi == doctest::Approx(trace.rows.back().arg / kPi));
  CHECK(trace.xi == doctest::Approx(0.25).epsilon(1e-9));
  for (std::size_t k = 1; k + 1 < trace.rows.size(); ++k) CHECK(trace.rows[k].y < trace.rows[k - 1].y);
}

TEST_CASE("exceptional boundary data") {
  // J^{-1} + A = 0 and B = 0: the symbol is singular.
  const auto d = engine::make_boundary_data(scalar(-1.0), scalar(0.0), scalar(1.0));
  try {
    (void)engine::scattering_matrix(d);
    FAIL("expected NonInvertibleSymbol");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonInvertibleSymbol);
  }
  try {
    (void)lattice(1.0, 1.0)->boundary_T(2.0);
    FAIL("expected BoundaryUndefined");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BoundaryUndefined);
  }
}

TEST_CASE("index at coupling values") {
  // J^{-1} = 1, A = 0, B = 1: J^{-1} + A + tB < 0 exactly for t < -1.
  const auto d = engine::make_boundary_data(scalar(0), scalar(1), scalar(1));
  CHECK(engine::index_at(d, 0.5, 1e-9) == 0);
  CHECK(engine::index_at(d, -2.0, 1e-9) == -1);
}

TEST_CASE("trace formula on an explicit pair") {
  const HermitianMatrix h0(Matrix::Zero(1, 1));
  const HermitianMatrix h(scalar(1.0));
  // xi = 1 on (0, 1): tr(phi(H) - phi(H0)) = phi(1) - phi(0) = int_0^1 phi'.
  for (int deg : {1, 2, 3}) CHECK(engine::trace_formula_defect(h0, h, engine::polynomial_test_function(deg)) < 1e-12);
  CHECK(engine::trace_formula_defect(h0, h, engine::bump_test_function(0.5, 1.0)) < 1e-12);
}

TEST_CASE("self-adjoint spectral flow of a scalar family") {
  engine::SelfAdjointFamilySampler family{[](double a) { return HermitianMatrix(scalar(2 * a - 1)); }, {-3.0, 3.0}};
  const auto flow = engine::selfadjoint_spectral_flow(family, {-2.0, 0.0, 2.0});
  CHECK(flow == std::vector<int>{0, -1, 0});
}

TEST_CASE("theta samples include the piece midpoints") {
  const circle::CircleStepFunction f({{1.0, 1}, {1.001, 1}}, 0);
  const auto th = engine::theta_samples({&f}, 64);
  CHECK(th.size() >= 64);
  CHECK(std::any_of(th.begin(), th.end(), [](double t) { return t > 1.0 && t <= 1.001; }));
}

TEST_CASE("invariance under both Moebius maps") {
  random::Rng rng(31);
  const auto model = random::dense_model(4, 2, random::Signature::Mixed, rng, 0.5);
  for (double lambda : random::gap_points(*model)) {
    for (const auto& f : {models::MoebiusMap::affine(2.0, 0.3), models::MoebiusMap::inverse_shift(-6.0)}) {
      const auto res = engine::invariance_defect(model, f, lambda);
      CHECK(res.defect == 0);
      CHECK(res.identity_residual < 1e-10);
    }
  }
}

TEST_CASE("check suites pass on small instance counts") {
  CHECK(checks::check_e_lemmas(5, 10).passed());
  CHECK(checks::check_lidski(5, 30).passed());
  CHECK(checks::check_index_rules(5, 30).passed());
  CHECK(checks::check_gap_relation(5, 10, 3).passed());
  CHECK(checks::check_scalar_closed_forms().passed());
  CHECK_THROWS_AS(checks::run_suite("unknown", 1), std::invalid_argument);
}
