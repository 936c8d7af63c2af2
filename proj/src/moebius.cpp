#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ssf/error.hpp"
#include "ssf/models.hpp"

namespace ssf::models {

MoebiusMap MoebiusMap::affine(double a, double b) {
  MoebiusMap f;
  f.kind = Kind::Affine;
  f.a = a;
  f.b = b;
  return f;
}

MoebiusMap MoebiusMap::inverse_shift(double lambda0) {
  MoebiusMap f;
  f.kind = Kind::InverseShift;
  f.lambda0 = lambda0;
  return f;
}

double MoebiusMap::operator()(double x) const {
  if (kind == Kind::Affine) return a * x + b;
  return -1.0 / (x - lambda0);
}

double MoebiusMap::derivative(double x) const {
  if (kind == Kind::Affine) return a;
  return 1.0 / ((x - lambda0) * (x - lambda0));
}

cd MoebiusMap::preimage(cd w) const {
  if (kind == Kind::Affine) return (w - b) / a;
  return lambda0 - 1.0 / w;
}

double MoebiusMap::preimage(double w) const {
  if (kind == Kind::Affine) return (w - b) / a;
  return lambda0 - 1.0 / w;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kAdmissibleMargin = 1e-6;

Index negative_count(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::hermitian_part(m), Eigen::EigenvaluesOnly);
  return (es.eigenvalues().array() < 0.0).count();
}

// lambda0 must lie strictly outside the spectra of H0 and H.  For H this is
// read off the symbol at lambda0: J^{-1} + T(lambda0) must be invertible with
// the inertia of J^{-1}, i.e. no eigenvalue of H has crossed lambda0.
void require_admissible(const ResolventModel& model, const MoebiusMap& f) {
  if (f.kind == MoebiusMap::Kind::Affine) {
    if (!(f.a > 0.0) || !std::isfinite(f.b)) {
      std::ostringstream os;
      os << "affine map needs a > 0 (a = " << f.a << ")";
      throw Error(ErrorKind::AdmissibilityViolation, os.str());
    }
    return;
  }
  const SpectrumInfo info = model.spectrum_info();
  const double l0 = f.lambda0;
  if (!(l0 < info.lower() - kAdmissibleMargin || l0 > info.upper() + kAdmissibleMargin)) {
    std::ostringstream os;
    os << "lambda0 = " << l0 << " is not outside the spectrum [" << info.lower() << ", "
       << info.upper() << "] of H0";
    throw Error(ErrorKind::AdmissibilityViolation, os.str());
  }
  const Matrix symbol = model.coupling().J_inv().matrix() + model.boundary_T(l0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::hermitian_part(symbol), Eigen::EigenvaluesOnly);
  const double gap = es.eigenvalues().cwiseAbs().minCoeff();
  if (gap <= kAdmissibleMargin) {
    throw Error(ErrorKind::AdmissibilityViolation, "lambda0 is an eigenvalue of H");
  }
  if (negative_count(symbol) != negative_count(model.coupling().J_inv().matrix())) {
    throw Error(ErrorKind::AdmissibilityViolation, "H has spectrum beyond lambda0");
  }
}

std::vector<cd> sample_points(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(-3.0, 3.0);
  std::uniform_real_distribution<double> im(0.1, 2.0);
  std::vector<cd> w;
  for (int k = 0; k < 10; ++k) w.emplace_back(re(rng), (k % 2 == 0 ? 1.0 : -1.0) * im(rng));
  return w;
}

double relative_defect(const Matrix& got, const Matrix& want) {
  return linalg::max_abs(got - want) / (1.0 + linalg::max_abs(want));
}

}  // namespace

Coupling TransformedModel::pushed_coupling(const ResolventModel& base, const MoebiusMap& f) {
  require_admissible(base, f);
  if (f.kind == MoebiusMap::Kind::Affine) return base.coupling();
  const Matrix symbol = base.coupling().J_inv().matrix() + base.boundary_T(f.lambda0);
  const Matrix inv = linalg::hermitian_part(symbol).inverse();
  return Coupling(HermitianMatrix(linalg::hermitian_part(inv)));
}

TransformedModel::TransformedModel(ModelPtr base, MoebiusMap f)
    : ResolventModel(pushed_coupling(*base, f)), base_(std::move(base)), f_(f) {
  if (f_.kind == MoebiusMap::Kind::InverseShift) {
    t_shift_ = linalg::hermitian_part(base_->boundary_T(f_.lambda0));
  } else {
    t_shift_ = Matrix::Zero(rank(), rank());
  }
}

Matrix TransformedModel::T(cd w) const {
  if (w.imag() == 0.0) throw Error(ErrorKind::InvalidArgument, "T(z) needs Im z != 0");
  return base_->T(f_.preimage(w)) - t_shift_;
}

Matrix TransformedModel::boundary_T(double w) const {
  if (f_.kind == MoebiusMap::Kind::InverseShift && w == 0.0) {
    throw Error(ErrorKind::BoundaryUndefined, "w = 0 is the image of infinity");
  }
  return base_->boundary_T(f_.preimage(w)) - t_shift_;
}

SpectrumInfo TransformedModel::spectrum_info() const {
  const SpectrumInfo in = base_->spectrum_info();
  SpectrumInfo out;
  for (const auto& [lo, hi] : in.intervals) out.intervals.emplace_back(f_(lo), f_(hi));
  for (double p : in.points) out.points.push_back(f_(p));
  std::sort(out.points.begin(), out.points.end());
  return out;
}

double TransformedModel::t_scale() const {
  return base_->t_scale() + linalg::max_abs(t_shift_) + linalg::max_abs(coupling().J().matrix());
}

// ---------------------------------------------------------------------------

Pushforward moebius_pushforward(const ModelPtr& model, const MoebiusMap& f, std::uint64_t seed) {
  require_admissible(*model, f);
  const std::vector<cd> ws = sample_points(seed);
  Pushforward out;

  if (const DenseModel* dense = model->as_dense()) {
    const linalg::EigenDecomposition e0 = linalg::eig_hermitian(dense->H0());
    const HermitianMatrix fh0 = linalg::apply_scalar_function(dense->H0(), [&](double x) { return f(x); });
    Matrix g;
    HermitianMatrix j = dense->coupling().J();
    if (f.kind == MoebiusMap::Kind::Affine) {
      g = std::sqrt(f.a) * dense->G();
    } else {
      Eigen::VectorXcd d(e0.values.size());
      for (Index k = 0; k < d.size(); ++k) d(k) = 1.0 / (e0.values(k) - f.lambda0);
      g = dense->G() * e0.vectors * d.asDiagonal() * e0.vectors.adjoint();
      const Matrix symbol = dense->coupling().J_inv().matrix() + dense->boundary_T(f.lambda0);
      j = HermitianMatrix(linalg::hermitian_part(linalg::hermitian_part(symbol).inverse()));
    }
    auto pushed = std::make_shared<DenseModel>(fh0, g, Coupling(j), seed);

    const Matrix shift = f.kind == MoebiusMap::Kind::Affine
                             ? Matrix::Zero(model->rank(), model->rank())
                             : Matrix(dense->boundary_T(f.lambda0));
    for (const cd w : ws) {
      out.identity_residual =
          std::max(out.identity_residual, relative_defect(pushed->T(w), model->T(f.preimage(w)) - shift));
    }
    const HermitianMatrix fh = linalg::apply_scalar_function(dense->H(), [&](double x) { return f(x); });
    const double fh_defect = linalg::max_abs(fh.matrix() - pushed->H().matrix());
    if (!(out.identity_residual < 1e-10) || !(fh_defect < 1e-9)) {
      std::ostringstream os;
      os << "pushforward identities fail: T residual " << out.identity_residual << ", f(H) defect "
         << fh_defect;
      throw Error(ErrorKind::ResolventIdentityViolation, os.str());
    }
    out.model = pushed;
    return out;
  }

  auto pushed = std::make_shared<TransformedModel>(model, f);
  // The coupled symbol J^{-1} + T must be carried over unchanged, and the
  // pushed T must stay Herglotz.
  for (const cd w : ws) {
    const Matrix lhs = pushed->coupling().J_inv().matrix() + pushed->T(w);
    const Matrix rhs = model->coupling().J_inv().matrix() + model->T(f.preimage(w));
    out.identity_residual = std::max(out.identity_residual, relative_defect(lhs, rhs));
    const Matrix sym = pushed->T(std::conj(w)) - pushed->T(w).adjoint();
    out.identity_residual = std::max(out.identity_residual, linalg::max_abs(sym));
    Eigen::SelfAdjointEigenSolver<Matrix> es(linalg::antihermitian_part_over_i(pushed->T(w)),
                                             Eigen::EigenvaluesOnly);
    const double im_sign = w.imag() > 0.0 ? 1.0 : -1.0;
    const double worst = im_sign > 0.0 ? es.eigenvalues().minCoeff() : -es.eigenvalues().maxCoeff();
    if (worst < -1e-10) {
      throw Error(ErrorKind::ResolventIdentityViolation, "pushed T is not Herglotz");
    }
  }
  if (!(out.identity_residual < 1e-10)) {
    std::ostringstream os;
    os << "pushforward identity residual " << out.identity_residual;
    throw Error(ErrorKind::ResolventIdentityViolation, os.str());
  }
  out.model = pushed;
  return out;
}

ConditionReport validate_condition_a1(const MoebiusMap& f, std::pair<double, double> omega,
                                      double lambda) {
  ConditionReport rep;
  const auto [lo, hi] = omega;
  if (!(lo < hi)) throw Error(ErrorKind::InvalidArgument, "Omega must be a non-empty interval");
  if (f.kind == MoebiusMap::Kind::Affine && !(f.a > 0.0)) {
    rep.violations.emplace_back("admissibility: a <= 0");
  }
  const bool pole_inside =
      f.kind == MoebiusMap::Kind::InverseShift && f.lambda0 >= lo && f.lambda0 <= hi;
  if (pole_inside) rep.violations.emplace_back("admissibility: lambda0 lies in Omega");

  if (f.kind == MoebiusMap::Kind::InverseShift && lambda == f.lambda0) {
    rep.derivative = std::numeric_limits<double>::infinity();
    rep.violations.emplace_back("(i): f is not differentiable at lambda");
  } else {
    rep.derivative = f.derivative(lambda);
    rep.derivative_positive = rep.derivative > 0.0 && std::isfinite(rep.derivative);
    if (!rep.derivative_positive) rep.violations.emplace_back("(i): f'(lambda) is not positive");
  }

  const double f_lambda = f(lambda);
  constexpr int kSamples = 10000;
  for (double delta : {1e-1, 1e-2}) {
    double inf = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kSamples; ++k) {
      const double x = lo + (hi - lo) * k / (kSamples - 1);
      if (std::abs(x - lambda) < delta) continue;
      if (f.kind == MoebiusMap::Kind::InverseShift && x == f.lambda0) continue;
      inf = std::min(inf, std::abs(f(x) - f_lambda));
    }
    rep.separation.emplace_back(delta, inf);
    if (!(inf > 0.0)) {
      std::ostringstream os;
      os << "(ii): separation vanishes for delta = " << delta;
      rep.violations.push_back(os.str());
    }
  }
  rep.pass = rep.violations.empty();
  return rep;
}

}  // namespace ssf::models
