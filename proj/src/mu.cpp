#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ssf/engine.hpp"
#include "ssf/error.hpp"

namespace ssf::engine {

using linalg::Index;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Fractions of an interval tried in turn when the midpoint lands on a kernel.
constexpr std::array<double, 4> kProbeFractions = {0.5, 0.5737, 0.3709, 0.7113};

std::vector<std::pair<double, int>> cluster_phases(const std::vector<double>& phases, double tol) {
  std::vector<std::pair<double, int>> out;
  for (double p : phases) {
    if (!out.empty() && p - out.back().first <= tol) {
      ++out.back().second;
    } else {
      out.emplace_back(p, 1);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(MuMethod m) { return m == MuMethod::Flow ? "flow" : "index"; }

BoundaryData boundary_data(const models::ResolventModel& model, double lambda) {
  models::BoundaryAB ab = models::AB_boundary(model, lambda);
  return {std::move(ab.A), std::move(ab.B), model.coupling().J_inv()};
}

BoundaryData make_boundary_data(const Matrix& a, const Matrix& b, const Matrix& j) {
  const models::Coupling c{HermitianMatrix(j)};
  const HermitianMatrix bh(b);
  Eigen::SelfAdjointEigenSolver<Matrix> es(bh.matrix(), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw Error(ErrorKind::InvalidArgument, "B must be positive semidefinite");
  }
  return {HermitianMatrix(a), bh, c.J_inv()};
}

UnitaryMatrix S_from_T(const Matrix& T, const HermitianMatrix& J_inv, double inv_tol) {
  const Index r = T.rows();
  const Matrix b_half = linalg::psd_sqrt(linalg::antihermitian_part_over_i(T),
                                         1e-10 * std::max(1.0, linalg::max_abs(T)));
  const Matrix symbol = J_inv.matrix() + T;
  const Eigen::JacobiSVD<Matrix> svd(symbol);
  const double smin = svd.singularValues().minCoeff();
  if (!(smin > inv_tol * std::max(1.0, svd.singularValues().maxCoeff()))) {
    std::ostringstream os;
    os << "J^{-1} + T is singular (smallest singular value " << smin << ")";
    throw Error(ErrorKind::NonInvertibleSymbol, os.str());
  }
  const Matrix s = Matrix::Identity(r, r) - cd(0.0, 2.0) * b_half * symbol.fullPivLu().solve(b_half);
  return UnitaryMatrix(s, 1e-8);
}

UnitaryMatrix S_of_z(const models::ResolventModel& model, cd z) {
  if (!(z.imag() > 0.0)) throw Error(ErrorKind::InvalidArgument, "S(z) needs Im z > 0");
  return S_from_T(model.T(z), model.coupling().J_inv());
}

UnitaryMatrix scattering_matrix(const BoundaryData& data, const EngineConfig& cfg) {
  const Matrix t = data.A.matrix() + cd(0.0, 1.0) * data.B.matrix();
  return S_from_T(t, data.J_inv, cfg.inv_tol);
}

UnitaryMatrix scattering_matrix(const models::ResolventModel& model, double lambda,
                                const EngineConfig& cfg) {
  return scattering_matrix(boundary_data(model, lambda), cfg);
}

int index_at(const BoundaryData& data, double t, double zero_tol) {
  const linalg::ProjectionMatrix p = linalg::xi_projection(data.J_inv, zero_tol);
  const HermitianMatrix m(data.J_inv.matrix() + data.A.matrix() + t * data.B.matrix(),
                          std::numeric_limits<double>::infinity());
  return linalg::fredholm_index(p, linalg::xi_projection(m, zero_tol));
}

namespace {

// Index value on an open interval of theta, probing away from kernel points.
int index_on_theta_interval(const BoundaryData& data, double lo, double hi, double zero_tol) {
  for (std::size_t k = 0;; ++k) {
    const double theta = lo + kProbeFractions[k] * (hi - lo);
    try {
      return index_at(data, 1.0 / std::tan(0.5 * theta), zero_tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::KernelAtZero || k + 1 == kProbeFractions.size()) throw;
    }
  }
}

int index_on_t_interval(const BoundaryData& data, double lo, double hi, double zero_tol) {
  for (std::size_t k = 0;; ++k) {
    double t;
    if (std::isinf(lo) && std::isinf(hi)) {
      t = kProbeFractions[k] - 0.5;
    } else if (std::isinf(lo)) {
      t = hi - (1.0 + kProbeFractions[k]) * std::max(1.0, std::abs(hi));
    } else if (std::isinf(hi)) {
      t = lo + (1.0 + kProbeFractions[k]) * std::max(1.0, std::abs(lo));
    } else {
      t = lo + kProbeFractions[k] * (hi - lo);
    }
    try {
      return -index_at(data, t, zero_tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::KernelAtZero || k + 1 == kProbeFractions.size()) throw;
    }
  }
}

}  // namespace

MuFunction mu_via_index(const BoundaryData& data, const EngineConfig& cfg) {
  const UnitaryMatrix s = scattering_matrix(data, cfg);
  MuFunction mu;
  mu.method = MuMethod::Index;
  mu.jump_phases_source = linalg::eigenphases(s, cfg.flow.id_tol);

  const auto clusters = cluster_phases(mu.jump_phases_source, cfg.phase_tol);
  std::vector<double> cuts{0.0};
  for (const auto& [p, m] : clusters) cuts.push_back(p);
  cuts.push_back(kTwoPi);

  std::vector<int> values;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    values.push_back(index_on_theta_interval(data, cuts[k], cuts[k + 1], cfg.zero_tol));
  }
  std::vector<circle::Jump> jumps;
  for (std::size_t k = 1; k < values.size(); ++k) {
    jumps.push_back({cuts[k], values[k - 1] - values[k]});
  }
  mu.step = CircleStepFunction(std::move(jumps), values.back());
  return mu;
}

MuFunction mu_via_index(const models::ResolventModel& model, double lambda, const EngineConfig& cfg) {
  MuFunction mu = mu_via_index(boundary_data(model, lambda), cfg);
  mu.lambda = lambda;
  return mu;
}

namespace {

double path_height(double t) { return (1.0 - t) / t; }

void require_off_spectrum(const models::DenseModel& dense, double lambda) {
  const auto check = [&](const linalg::RealVector& vals, const char* which) {
    const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
    if ((vals.array() - lambda).abs().minCoeff() <= 1e-9 * scale) {
      std::ostringstream os;
      os << "lambda = " << lambda << " is an eigenvalue of " << which;
      throw Error(ErrorKind::BoundaryUndefined, os.str());
    }
  };
  check(dense.H0_eigenvalues(), "H0");
  check(dense.H_eigenvalues(), "H");
}

// Below y = 1e-2 dist(lambda, spectrum) and above y = 1e2 t_scale the path
// varies slowly; the endpoint walks must reach both heights.
void set_settle_heights(circle::UnitaryPathSampler& path, double dist, double t_scale) {
  path.settled_above = 1.0 / (1.0 + 1e-2 * dist);
  path.settled_below = 1.0 / (1.0 + 1e2 * std::max(1.0, t_scale));
}

double distance_to_spectrum(const models::ResolventModel& model, double lambda) {
  const models::SpectrumInfo info = model.spectrum_info();
  double d = std::numeric_limits<double>::infinity();
  for (const auto& [lo, hi] : info.intervals) d = std::min({d, std::abs(lambda - lo), std::abs(lambda - hi)});
  for (double p : info.points) d = std::min(d, std::abs(lambda - p));
  if (const models::DenseModel* dense = model.as_dense()) {
    d = std::min(d, (dense->H_eigenvalues().array() - lambda).abs().minCoeff());
  }
  return std::isfinite(d) ? d : 1.0;
}

}  // namespace

MuFunction mu_via_flow_S(const models::ResolventModel& model, double lambda, const EngineConfig& cfg,
                         circle::FlowDiagnostics* diag) {
  MuFunction mu;
  mu.lambda = lambda;
  mu.method = MuMethod::Flow;
  const UnitaryMatrix s_boundary = scattering_matrix(model, lambda, cfg);
  mu.jump_phases_source = linalg::eigenphases(s_boundary, cfg.flow.id_tol);

  circle::UnitaryPathSampler path;
  path.eval = [&](double t) { return S_of_z(model, cd(lambda, path_height(t))); };
  path.limit_at_0 = circle::SpectrumClass{};
  path.limit_at_1 = circle::SpectrumClass(mu.jump_phases_source);
  set_settle_heights(path, distance_to_spectrum(model, lambda), model.t_scale());
  mu.step = circle::spectral_flow(path, cfg.flow, diag);
  return mu;
}

MuFunction mu_via_flow(const models::ResolventModel& model, double lambda, const EngineConfig& cfg,
                       circle::FlowDiagnostics* diag) {
  const models::DenseModel* dense = model.as_dense();
  if (dense == nullptr || !cfg.dense_m_path) return mu_via_flow_S(model, lambda, cfg, diag);

  // For a matrix pair lambda is necessarily a gap point, where M(lambda + i0) = I.
  require_off_spectrum(*dense, lambda);
  MuFunction mu;
  mu.lambda = lambda;
  mu.method = MuMethod::Flow;
  mu.jump_phases_source = linalg::eigenphases(scattering_matrix(model, lambda, cfg), cfg.flow.id_tol);

  circle::UnitaryPathSampler path;
  path.eval = [&](double t) { return dense->M_of_z(cd(lambda, path_height(t))); };
  path.limit_at_0 = circle::SpectrumClass{};
  path.limit_at_1 = circle::SpectrumClass{};
  set_settle_heights(path, distance_to_spectrum(model, lambda), model.t_scale());
  mu.step = circle::spectral_flow(path, cfg.flow, diag);
  return mu;
}

std::pair<MuFunction, MuFunction> mu_both(const models::ResolventModel& model, double lambda,
                                          const EngineConfig& cfg) {
  MuFunction by_flow = mu_via_flow(model, lambda, cfg);
  MuFunction by_index = mu_via_index(model, lambda, cfg);
  if (!by_flow.step.equals(by_index.step, cfg.phase_tol)) {
    std::ostringstream os;
    os << "flow and index disagree at lambda = " << lambda;
    throw Error(ErrorKind::MethodDisagreement, os.str());
  }
  return {std::move(by_flow), std::move(by_index)};
}

double ssf_from_mu(const MuFunction& mu) { return 0.0 - mu.step.integral() / kTwoPi; }

double ssf_index_integral(const BoundaryData& data, const EngineConfig& cfg) {
  const UnitaryMatrix s = scattering_matrix(data, cfg);
  const auto clusters = cluster_phases(linalg::eigenphases(s, cfg.flow.id_tol), cfg.phase_tol);

  // Jumps in the coupling t sit at t_j = cot(theta_j / 2).
  std::vector<double> cuts{-std::numeric_limits<double>::infinity()};
  for (auto it = clusters.rbegin(); it != clusters.rend(); ++it) {
    cuts.push_back(1.0 / std::tan(0.5 * it->first));
  }
  cuts.push_back(std::numeric_limits<double>::infinity());

  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const int value = index_on_t_interval(data, cuts[k], cuts[k + 1], cfg.zero_tol);
    acc += value * (std::atan(cuts[k + 1]) - std::atan(cuts[k]));
  }
  return acc / std::numbers::pi;
}

double ssf_index_integral(const models::ResolventModel& model, double lambda, const EngineConfig& cfg) {
  return ssf_index_integral(boundary_data(model, lambda), cfg);
}

}  // namespace ssf::engine
