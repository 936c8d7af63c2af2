#pragma once

// mu(theta; lambda) by spectral flow and by the projection index, the
// spectral shift function by three routes, and the consistency checks that
// tie them to eigenvalue counting.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssf/circle_flow.hpp"
#include "ssf/linalg.hpp"
#include "ssf/models.hpp"

namespace ssf::engine {

using circle::CircleStepFunction;
using linalg::cd;
using linalg::HermitianMatrix;
using linalg::Matrix;
using linalg::UnitaryMatrix;

struct EngineConfig {
  circle::FlowConfig flow;
  double zero_tol = 1e-9;      // spectral projection guard
  double inv_tol = 1e-10;      // invertibility of J^{-1} + T(lambda + i0)
  double phase_tol = 1e-8;     // eigenphase clustering
  int theta_samples = 64;
  double y_max = 0.0;          // determinant anchor; 0 picks 1e3 (1 + scale)
  double y_min = 1e-9;
  double grid_ratio = 0.8;
  int det_max_depth = 30;
  bool dense_m_path = true;    // flow along M(z) instead of S(z) for dense models
};

/// Boundary data (A, B, J^{-1}) at one energy.  Scalar closed forms and random
/// instances are fed in directly; models go through boundary_data().
struct BoundaryData {
  HermitianMatrix A;
  HermitianMatrix B;
  HermitianMatrix J_inv;
};

BoundaryData boundary_data(const models::ResolventModel& model, double lambda);
BoundaryData make_boundary_data(const Matrix& a, const Matrix& b, const Matrix& j);

enum class MuMethod { Flow, Index };

std::string_view to_string(MuMethod m);

struct MuFunction {
  double lambda = 0.0;
  CircleStepFunction step;
  std::vector<double> jump_phases_source;  // eigenphases of S(lambda + i0)
  MuMethod method = MuMethod::Index;
};

/// S = I - 2i B^{1/2} (J^{-1} + T)^{-1} B^{1/2} with B = Im T.
UnitaryMatrix S_from_T(const Matrix& T, const HermitianMatrix& J_inv, double inv_tol = 1e-10);
UnitaryMatrix S_of_z(const models::ResolventModel& model, cd z);
UnitaryMatrix scattering_matrix(const models::ResolventModel& model, double lambda,
                                const EngineConfig& cfg = {});
UnitaryMatrix scattering_matrix(const BoundaryData& data, const EngineConfig& cfg = {});

/// index(Xi(J^{-1}), Xi(J^{-1} + A + t B)).
int index_at(const BoundaryData& data, double t, double zero_tol);

MuFunction mu_via_index(const BoundaryData& data, const EngineConfig& cfg = {});
MuFunction mu_via_index(const models::ResolventModel& model, double lambda,
                        const EngineConfig& cfg = {});
MuFunction mu_via_flow(const models::ResolventModel& model, double lambda,
                       const EngineConfig& cfg = {}, circle::FlowDiagnostics* diag = nullptr);
/// Flow of t -> S(lambda + i(1-t)/t) on the r x r side, regardless of model type.
MuFunction mu_via_flow_S(const models::ResolventModel& model, double lambda,
                         const EngineConfig& cfg = {}, circle::FlowDiagnostics* diag = nullptr);

/// Runs both methods and throws MethodDisagreement unless they coincide.
std::pair<MuFunction, MuFunction> mu_both(const models::ResolventModel& model, double lambda,
                                          const EngineConfig& cfg = {});

double ssf_from_mu(const MuFunction& mu);
double ssf_index_integral(const BoundaryData& data, const EngineConfig& cfg = {});
double ssf_index_integral(const models::ResolventModel& model, double lambda,
                          const EngineConfig& cfg = {});

/// D(z) = det(I + J T(z)).
cd perturbation_determinant(const models::ResolventModel& model, cd z);
cd perturbation_determinant_boundary(const models::ResolventModel& model, double lambda);

struct DetRow {
  double y;  // 0 marks the boundary value
  cd D;
  double arg;  // continuous branch, 0 at the anchor
};

struct DeterminantTrace {
  double lambda = 0.0;
  double y_max = 0.0;
  std::vector<DetRow> rows;
  double xi = 0.0;
};

DeterminantTrace determinant_trace(const models::ResolventModel& model, double lambda,
                                   const EngineConfig& cfg = {});
double ssf_via_determinant(const models::ResolventModel& model, double lambda,
                           const EngineConfig& cfg = {});

/// |det S(lambda + i0) - exp(-2 pi i xi)| with xi from the index integral.
double birman_krein_defect(const models::ResolventModel& model, double lambda,
                           const EngineConfig& cfg = {});
double birman_krein_defect(const BoundaryData& data, const EngineConfig& cfg = {});

/// rank E_{H0}(-inf, lambda) - rank E_H(-inf, lambda).
int counting_ssf_oracle(const HermitianMatrix& H0, const HermitianMatrix& H, double lambda);

struct TestFunction {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  std::pair<double, double> support;
};

TestFunction polynomial_test_function(int degree);
/// exp(-1/(1-u^2)) with u = (x - center)/half_width, zero outside.
TestFunction bump_test_function(double center, double half_width);

double trace_formula_defect(const HermitianMatrix& H0, const HermitianMatrix& H, const TestFunction& f);

/// 64 shifted equispaced phases plus the midpoints between jumps of the given
/// step functions.
std::vector<double> theta_samples(const std::vector<const CircleStepFunction*>& fs, int count = 64);

/// max over theta of |[mu(lambda2) - mu(lambda1)] - [N(lambda1,lambda2;H) - N(lambda1,lambda2;H0)]|.
int gap_mu_relation_defect(const models::DenseModel& model, double lambda1, double lambda2,
                           const EngineConfig& cfg = {});

/// max over theta of |mu(theta; lambda) - mu(theta; f(lambda))| for the pushed pair.
struct InvarianceResult {
  int defect = 0;
  double identity_residual = 0.0;
};
InvarianceResult invariance_defect(const models::ModelPtr& model, const models::MoebiusMap& f,
                                   double lambda, const EngineConfig& cfg = {});

struct SelfAdjointFamilySampler {
  std::function<HermitianMatrix(double)> eval;  // alpha in [0, 1]
  std::pair<double, double> window;
};

/// Net number of eigenvalues crossing each lambda leftwards along the family,
/// computed from certified gaps in the window.
std::vector<int> selfadjoint_spectral_flow(const SelfAdjointFamilySampler& family,
                                           const std::vector<double>& lambdas,
                                           const circle::FlowConfig& cfg = {});

}  // namespace ssf::engine
