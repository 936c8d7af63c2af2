#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ssf/error.hpp"
#include "ssf/models.hpp"

namespace ssf::models {

using linalg::RealVector;

double SpectrumInfo::lower() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : intervals) lo = std::min(lo, a);
  for (double p : points) lo = std::min(lo, p);
  return lo;
}

double SpectrumInfo::upper() const {
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : intervals) hi = std::max(hi, b);
  for (double p : points) hi = std::max(hi, p);
  return hi;
}

namespace {

HermitianMatrix invert_coupling(const HermitianMatrix& j, double tol) {
  const linalg::EigenDecomposition ed = linalg::eig_hermitian(j);
  const double gap = ed.values.cwiseAbs().minCoeff();
  if (!(gap > tol)) {
    std::ostringstream os;
    os << "J is not invertible: min |eig J| = " << gap;
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  const RealVector inv = ed.values.cwiseInverse();
  return HermitianMatrix(linalg::hermitian_part(ed.vectors * inv.cast<cd>().asDiagonal() *
                                                ed.vectors.adjoint()));
}

}  // namespace

Coupling::Coupling(HermitianMatrix j, double j_inv_tol)
    : j_(std::move(j)), j_inv_(invert_coupling(j_, j_inv_tol)) {}

BoundaryAB AB_boundary(const ResolventModel& model, double lambda) {
  const Matrix t = model.boundary_T(lambda);
  const HermitianMatrix a(linalg::hermitian_part(t));
  Matrix b = linalg::antihermitian_part_over_i(t);
  Eigen::SelfAdjointEigenSolver<Matrix> es(b);
  RealVector vals = es.eigenvalues();
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  for (Index k = 0; k < vals.size(); ++k) {
    if (vals(k) < -1e-10 * scale) {
      std::ostringstream os;
      os << "Im T(lambda+i0) has eigenvalue " << vals(k) << " at lambda = " << lambda;
      throw Error(ErrorKind::BoundaryUndefined, os.str());
    }
    vals(k) = std::max(vals(k), 0.0);
  }
  b = es.eigenvectors() * vals.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
  return {a, HermitianMatrix(linalg::hermitian_part(b))};
}

// ---------------------------------------------------------------------------

// With bounded H0 the weighted form (|H0|+I)^{1/2} of the sandwiched resolvent
// collapses to G (H0 - z)^{-1} G*, which is what is stored here.
DenseModel::DenseModel(HermitianMatrix h0, Matrix g, Coupling j, std::uint64_t seed)
    : ResolventModel(std::move(j)), h0_(std::move(h0)), g_(std::move(g)), h_(h0_) {
  if (g_.cols() != h0_.dim() || g_.rows() != rank()) {
    std::ostringstream os;
    os << "G is " << g_.rows() << "x" << g_.cols() << ", expected " << rank() << "x" << h0_.dim();
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
  h0_eig_ = linalg::eig_hermitian(h0_);
  g_v_ = g_ * h0_eig_.vectors;
  h_ = HermitianMatrix(h0_.matrix() + g_.adjoint() * coupling().J().matrix() * g_,
                       std::numeric_limits<double>::infinity());
  h_eig_ = linalg::eig_hermitian(h_);

  // Resolvent identity at seeded points off the axis.
  const Index n = h0_.dim();
  const Matrix I = Matrix::Identity(n, n);
  const double lo = h0_eig_.values.minCoeff() - 1.0;
  const double hi = h0_eig_.values.maxCoeff() + 1.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> re(lo, hi);
  std::uniform_real_distribution<double> im(0.1, 2.0);
  for (int k = 0; k < 5; ++k) {
    const cd z(re(rng), (k % 2 == 0 ? 1.0 : -1.0) * im(rng));
    const Matrix r0 = (h0_.matrix() - z * I).partialPivLu().inverse();
    const Matrix r0_bar = (h0_.matrix() - std::conj(z) * I).partialPivLu().inverse();
    const Matrix r = (h_.matrix() - z * I).partialPivLu().inverse();
    const Matrix symbol = coupling().J_inv().matrix() + T(z);
    const Matrix left = g_ * r0_bar;
    const Matrix right = g_ * r0;
    const Matrix defect = r - r0 + left.adjoint() * symbol.partialPivLu().solve(right);
    identity_residual_ = std::max(identity_residual_, linalg::max_abs(defect));
  }
  if (!(identity_residual_ < 1e-9)) {
    std::ostringstream os;
    os << "resolvent identity residual " << identity_residual_;
    throw Error(ErrorKind::ResolventIdentityViolation, os.str());
  }
}

Matrix DenseModel::T(cd z) const {
  Eigen::VectorXcd d(h0_eig_.values.size());
  for (Index k = 0; k < d.size(); ++k) d(k) = 1.0 / (h0_eig_.values(k) - z);
  return g_v_ * d.asDiagonal() * g_v_.adjoint();
}

Matrix DenseModel::boundary_T(double lambda) const {
  const double scale = std::max(1.0, h0_eig_.values.cwiseAbs().maxCoeff());
  const double dist = (h0_eig_.values.array() - lambda).abs().minCoeff();
  if (dist <= 1e-9 * scale) {
    std::ostringstream os;
    os << "lambda = " << lambda << " is an eigenvalue of H0";
    throw Error(ErrorKind::BoundaryUndefined, os.str());
  }
  Eigen::VectorXcd d(h0_eig_.values.size());
  for (Index k = 0; k < d.size(); ++k) d(k) = 1.0 / (h0_eig_.values(k) - lambda);
  return linalg::hermitian_part(g_v_ * d.asDiagonal() * g_v_.adjoint());
}

SpectrumInfo DenseModel::spectrum_info() const {
  SpectrumInfo info;
  info.points.assign(h0_eig_.values.data(), h0_eig_.values.data() + h0_eig_.values.size());
  return info;
}

double DenseModel::t_scale() const {
  return g_.squaredNorm() * linalg::schatten_norm(coupling().J(), 2.0) +
         h0_eig_.values.cwiseAbs().maxCoeff();
}

linalg::UnitaryMatrix DenseModel::M_of_z(cd z) const {
  const auto pole_check = [&](const RealVector& vals, const char* which) {
    for (Index k = 0; k < vals.size(); ++k) {
      if (std::abs(vals(k) - z) < 1e-12) {
        std::ostringstream os;
        os << "z = " << z << " hits an eigenvalue of " << which;
        throw Error(ErrorKind::PoleHit, os.str());
      }
    }
  };
  pole_check(h_eig_.values, "H");
  pole_check(h0_eig_.values, "H0");
  const cd zb = std::conj(z);
  Eigen::VectorXcd dh(h_eig_.values.size());
  Eigen::VectorXcd d0(h0_eig_.values.size());
  for (Index k = 0; k < dh.size(); ++k) dh(k) = (h_eig_.values(k) - zb) / (h_eig_.values(k) - z);
  for (Index k = 0; k < d0.size(); ++k) d0(k) = (h0_eig_.values(k) - z) / (h0_eig_.values(k) - zb);
  const Matrix m = (h_eig_.vectors * dh.asDiagonal() * h_eig_.vectors.adjoint()) *
                   (h0_eig_.vectors * d0.asDiagonal() * h0_eig_.vectors.adjoint());
  return linalg::UnitaryMatrix(m, 1e-9);
}

Matrix DenseModel::M_factorized(cd z) const {
  const Index n = h0_.dim();
  const Matrix I = Matrix::Identity(n, n);
  const cd zb = std::conj(z);
  const Matrix r0 = (h0_.matrix() - z * I).partialPivLu().inverse();
  const Matrix r0_bar = (h0_.matrix() - zb * I).partialPivLu().inverse();
  const Matrix left = g_ * r0_bar;
  const Matrix right = g_ * r0;
  const Matrix symbol = coupling().J_inv().matrix() + T(z);
  return I - (z - zb) * left.adjoint() * symbol.partialPivLu().solve(right) * (I - (z - zb) * r0_bar);
}

HermitianMatrix build_H(const DenseModel& model) { return model.H(); }

}  // namespace ssf::models
