#include "ssf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ssf/error.hpp"

namespace ssf::linalg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Eigenvalues of W's real part closer than this are treated as one cluster
// and split by the imaginary part.
constexpr double kClusterTol = 1e-8;

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw Error(ErrorKind::InvalidArgument, std::string(what) + " must be a non-empty square matrix");
  }
}

}  // namespace

Matrix adjoint(const Matrix& m) { return m.adjoint(); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Matrix antihermitian_part_over_i(const Matrix& m) {
  return (m - m.adjoint()) / cd(0.0, 2.0);
}

// ---------------------------------------------------------------------------

HermitianMatrix::HermitianMatrix(const Matrix& entries, double herm_tol) : tol_(herm_tol) {
  require_square(entries, "HermitianMatrix");
  const double defect = max_abs(entries - entries.adjoint());
  if (!(defect <= herm_tol)) {
    std::ostringstream os;
    os << "max |M - M*| = " << defect << " exceeds " << herm_tol;
    throw Error(ErrorKind::NotHermitian, os.str());
  }
  m_ = hermitian_part(entries);
}

HermitianMatrix HermitianMatrix::zero(Index dim) { return HermitianMatrix(Matrix::Zero(dim, dim)); }

HermitianMatrix HermitianMatrix::identity(Index dim) {
  return HermitianMatrix(Matrix::Identity(dim, dim));
}

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& values) {
  Matrix m = Matrix::Zero(static_cast<Index>(values.size()), static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return HermitianMatrix(m);
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  return HermitianMatrix(m_ + o.m_, std::max(tol_, o.tol_));
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  return HermitianMatrix(m_ - o.m_, std::max(tol_, o.tol_));
}

HermitianMatrix HermitianMatrix::operator*(double s) const { return HermitianMatrix(m_ * s, tol_); }

UnitaryMatrix::UnitaryMatrix(const Matrix& entries, double unit_tol) : m_(entries) {
  require_square(entries, "UnitaryMatrix");
  const Matrix defect = entries * entries.adjoint() - Matrix::Identity(entries.rows(), entries.rows());
  const double d = max_abs(defect);
  if (!(d <= unit_tol)) {
    std::ostringstream os;
    os << "max |W W* - I| = " << d << " exceeds " << unit_tol;
    throw Error(ErrorKind::NotUnitary, os.str());
  }
}

ProjectionMatrix::ProjectionMatrix(const Matrix& entries, double proj_tol) : m_(entries) {
  require_square(entries, "ProjectionMatrix");
  const double idem = max_abs(entries * entries - entries);
  const double herm = max_abs(entries - entries.adjoint());
  if (!(idem <= proj_tol && herm <= proj_tol)) {
    std::ostringstream os;
    os << "not an orthogonal projection (|P^2-P| = " << idem << ", |P-P*| = " << herm << ")";
    throw Error(ErrorKind::InvalidArgument, os.str());
  }
}

Index ProjectionMatrix::rank() const {
  return static_cast<Index>(std::lround(m_.trace().real()));
}

// ---------------------------------------------------------------------------

EigenDecomposition eig_hermitian(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, "Hermitian eigensolver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

std::vector<double> eigenphases(const UnitaryMatrix& w, double id_tol) {
  const Matrix& W = w.matrix();
  const Index n = W.rows();

  // W is normal, so Re W and Im W commute and share an eigenbasis: split by
  // Re W first, then resolve each Re-cluster with Im W.
  Eigen::SelfAdjointEigenSolver<Matrix> re_solver(hermitian_part(W));
  const RealVector& re_vals = re_solver.eigenvalues();
  const Matrix& re_vecs = re_solver.eigenvectors();
  const Matrix im_part = antihermitian_part_over_i(W);

  std::vector<double> phases;
  phases.reserve(static_cast<std::size_t>(n));
  Index start = 0;
  while (start < n) {
    Index stop = start + 1;
    while (stop < n && re_vals(stop) - re_vals(stop - 1) <= kClusterTol) ++stop;
    const Matrix basis = re_vecs.middleCols(start, stop - start);
    Matrix vectors = basis;
    if (stop - start > 1) {
      const Matrix reduced = hermitian_part(basis.adjoint() * im_part * basis);
      Eigen::SelfAdjointEigenSolver<Matrix> im_solver(reduced);
      vectors = basis * im_solver.eigenvectors();
    }
    for (Index k = 0; k < vectors.cols(); ++k) {
      const cd z = vectors.col(k).dot(W * vectors.col(k));
      double phase = std::arg(z);
      if (phase < 0.0) phase += kTwoPi;
      if (2.0 * std::abs(std::sin(0.5 * phase)) > id_tol) phases.push_back(phase);
    }
    start = stop;
  }
  std::sort(phases.begin(), phases.end());
  return phases;
}

ProjectionMatrix xi_projection(const HermitianMatrix& m, double zero_tol) {
  const EigenDecomposition ed = eig_hermitian(m);
  std::vector<double> offending;
  for (Index k = 0; k < ed.values.size(); ++k) {
    if (std::abs(ed.values(k)) < zero_tol) offending.push_back(ed.values(k));
  }
  if (!offending.empty()) {
    std::ostringstream os;
    os << "eigenvalue(s) within " << zero_tol << " of zero:";
    for (double v : offending) os << ' ' << v;
    throw Error(ErrorKind::KernelAtZero, os.str());
  }
  Index neg = 0;
  while (neg < ed.values.size() && ed.values(neg) < 0.0) ++neg;
  const Matrix v = ed.vectors.leftCols(neg);
  return ProjectionMatrix(v * v.adjoint());
}

int fredholm_index(const ProjectionMatrix& p, const ProjectionMatrix& q, double one_tol) {
  if (p.dim() != q.dim()) {
    throw Error(ErrorKind::InvalidArgument, "fredholm_index: dimension mismatch");
  }
  const Matrix diff = p.matrix() - q.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(diff), Eigen::EigenvaluesOnly);
  int plus = 0;
  int minus = 0;
  for (Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double v = es.eigenvalues()(k);
    if (std::abs(v - 1.0) <= one_tol) ++plus;
    if (std::abs(v + 1.0) <= one_tol) ++minus;
  }
  const int by_kernels = plus - minus;
  const double trace = diff.trace().real();
  const double rounded = std::round(trace);
  if (std::abs(trace - rounded) > 1e-6 || static_cast<int>(rounded) != by_kernels) {
    std::ostringstream os;
    os << "kernel count " << by_kernels << " vs trace " << trace;
    throw Error(ErrorKind::IndexMismatch, os.str());
  }
  return by_kernels;
}

HermitianMatrix apply_scalar_function(const HermitianMatrix& m,
                                      const std::function<double(double)>& f) {
  const EigenDecomposition ed = eig_hermitian(m);
  RealVector mapped(ed.values.size());
  for (Index k = 0; k < ed.values.size(); ++k) {
    const double x = ed.values(k);
    const double y = f(x);
    if (!std::isfinite(y)) {
      std::ostringstream os;
      os << "function not finite at eigenvalue " << x;
      throw Error(ErrorKind::DomainViolation, os.str());
    }
    mapped(k) = y;
  }
  const Matrix out = ed.vectors * mapped.cast<cd>().asDiagonal() * ed.vectors.adjoint();
  return HermitianMatrix(hermitian_part(out), std::numeric_limits<double>::infinity());
}

cd det_complex(const Matrix& m) {
  require_square(m, "det_complex");
  return Eigen::FullPivLU<Matrix>(m).determinant();
}

Matrix psd_sqrt(const Matrix& b, double neg_tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(b));
  RealVector roots(es.eigenvalues().size());
  for (Index k = 0; k < roots.size(); ++k) {
    const double v = es.eigenvalues()(k);
    if (v < -neg_tol) {
      std::ostringstream os;
      os << "psd_sqrt: eigenvalue " << v << " below -" << neg_tol;
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
    roots(k) = std::sqrt(std::max(v, 0.0));
  }
  return es.eigenvectors() * roots.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<PencilZero> pencil_real_zeros(const HermitianMatrix& m, const HermitianMatrix& b,
                                          double lo, double hi, double tol) {
  if (m.dim() != b.dim()) {
    throw Error(ErrorKind::InvalidArgument, "pencil_real_zeros: dimension mismatch");
  }
  const EigenDecomposition em = eig_hermitian(m);
  const double m_scale = std::max(1.0, em.values.cwiseAbs().maxCoeff());
  const double m_gap = em.values.cwiseAbs().minCoeff();
  if (m_gap <= tol * m_scale) {
    std::ostringstream os;
    os << "M has eigenvalue " << m_gap << " near zero";
    throw Error(ErrorKind::SingularM, os.str());
  }

  const EigenDecomposition eb = eig_hermitian(b);
  const double b_scale = std::max(1.0, eb.values.cwiseAbs().maxCoeff());
  std::vector<Index> range_cols;
  for (Index k = 0; k < eb.values.size(); ++k) {
    const double v = eb.values(k);
    if (v < -tol * b_scale) {
      throw Error(ErrorKind::InvalidArgument, "pencil_real_zeros: B is not positive semidefinite");
    }
    if (v > tol * b_scale) range_cols.push_back(k);
  }
  if (range_cols.empty()) return {};

  // Birman-Schwinger operator on ran B: K = B^{1/2} M^{-1} B^{1/2}.
  const Index r = static_cast<Index>(range_cols.size());
  Matrix half(b.dim(), r);
  for (Index j = 0; j < r; ++j) {
    half.col(j) = eb.vectors.col(range_cols[j]) * std::sqrt(eb.values(range_cols[j]));
  }
  const RealVector inv_vals = em.values.cwiseInverse();
  const Matrix m_inv = em.vectors * inv_vals.cast<cd>().asDiagonal() * em.vectors.adjoint();
  const Matrix k = hermitian_part(half.adjoint() * m_inv * half);
  Eigen::SelfAdjointEigenSolver<Matrix> ek(k, Eigen::EigenvaluesOnly);

  // Ker(M + sB) != 0  <=>  K has eigenvalue -1/s, with equal multiplicity.
  std::vector<double> zeros;
  const double k_scale = std::max(1.0, ek.eigenvalues().cwiseAbs().maxCoeff());
  for (Index j = 0; j < ek.eigenvalues().size(); ++j) {
    const double kappa = ek.eigenvalues()(j);
    if (std::abs(kappa) <= tol * k_scale) continue;
    const double s = -1.0 / kappa;
    if (s > lo && s <= hi) zeros.push_back(s);
  }
  std::sort(zeros.begin(), zeros.end());
  std::vector<PencilZero> out;
  for (double s : zeros) {
    if (!out.empty() && std::abs(s - out.back().s) <= 1e-8 * std::max(1.0, std::abs(s))) {
      ++out.back().multiplicity;
    } else {
      out.push_back({s, 1});
    }
  }
  return out;
}

EigenSequencePair eigenvalue_sequences(const HermitianMatrix& a) {
  const EigenDecomposition ed = eig_hermitian(a);
  EigenSequencePair out;
  for (Index k = ed.values.size() - 1; k >= 0; --k) {
    if (ed.values(k) >= 0.0) out.pos.push_back(ed.values(k));
  }
  for (Index k = 0; k < ed.values.size(); ++k) {
    if (ed.values(k) <= 0.0) out.neg.push_back(-ed.values(k));
  }
  return out;
}

namespace {

void accumulate_padded(const std::vector<double>& x, const std::vector<double>& y, double p,
                       double& acc) {
  const std::size_t len = std::max(x.size(), y.size());
  for (std::size_t i = 0; i < len; ++i) {
    const double d = std::abs((i < x.size() ? x[i] : 0.0) - (i < y.size() ? y[i] : 0.0));
    if (std::isinf(p)) {
      acc = std::max(acc, d);
    } else {
      acc += std::pow(d, p);
    }
  }
}

}  // namespace

double sequence_distance(const EigenSequencePair& a, const EigenSequencePair& b, double p) {
  double acc = 0.0;
  accumulate_padded(a.pos, b.pos, p, acc);
  accumulate_padded(a.neg, b.neg, p, acc);
  return std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
}

double schatten_norm(const HermitianMatrix& a, double p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  const RealVector s = es.eigenvalues().cwiseAbs();
  if (std::isinf(p)) return s.maxCoeff();
  double acc = 0.0;
  for (Index k = 0; k < s.size(); ++k) acc += std::pow(s(k), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace ssf::linalg
