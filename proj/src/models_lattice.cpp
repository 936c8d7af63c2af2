#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ssf/error.hpp"
#include "ssf/models.hpp"

namespace ssf::models {

namespace {

constexpr double kThresholdTol = 1e-12;

cd ipow(cd base, long e) {
  cd acc = 1.0;
  while (e > 0) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

cd green_from_zeta(long n, long m, cd zeta) {
  if (n < 0 || m < 0) throw Error(ErrorKind::InvalidArgument, "lattice sites must be non-negative");
  if (n == 0 || m == 0) return 0.0;
  return (ipow(zeta, n + m) - ipow(zeta, std::abs(n - m))) / (1.0 / zeta - zeta);
}

cd boundary_zeta(double lambda) {
  if (std::abs(std::abs(lambda) - 2.0) <= kThresholdTol) {
    std::ostringstream os;
    os << "lambda = " << lambda << " is a band edge";
    throw Error(ErrorKind::BranchAtThreshold, os.str());
  }
  if (std::abs(lambda) < 2.0) return std::polar(1.0, -std::acos(0.5 * lambda));
  const double s = std::copysign(std::sqrt(lambda * lambda - 4.0), lambda);
  // Rationalised root, free of cancellation.
  return 2.0 / (lambda + s);
}

}  // namespace

cd lattice_zeta(cd z) {
  if (z.imag() == 0.0) return boundary_zeta(z.real());
  const cd s = std::sqrt(z * z - 4.0);
  const cd q1 = 0.5 * (z + s);
  const cd q2 = 0.5 * (z - s);
  return 1.0 / (std::abs(q1) >= std::abs(q2) ? q1 : q2);
}

cd lattice_green(long n, long m, cd z) { return green_from_zeta(n, m, lattice_zeta(z)); }

cd lattice_green_boundary(long n, long m, double lambda) {
  return green_from_zeta(n, m, boundary_zeta(lambda));
}

// ---------------------------------------------------------------------------

HalfLineLaplacianModel::HalfLineLaplacianModel(std::vector<long> sites, Matrix weights, Coupling j)
    : ResolventModel(std::move(j)), sites_(std::move(sites)), w_(std::move(weights)) {
  if (sites_.empty()) throw Error(ErrorKind::InvalidArgument, "lattice perturbation needs a site");
  if (std::set<long>(sites_.begin(), sites_.end()).size() != sites_.size() ||
      *std::min_element(sites_.begin(), sites_.end()) < 1) {
    throw Error(ErrorKind::InvalidArgument, "lattice sites must be distinct positive integers");
  }
  if (w_.rows() != rank() || w_.cols() != static_cast<Index>(sites_.size())) {
    std::ostringstream os;
    os << "weights are " << w_.rows() << "x" << w_.cols() << ", expected " << rank() << "x"
       << sites_.size();
    throw Error(ErrorKind::InvalidArgument, os.str());
  }

  // The closed form must solve the defining recurrence, off the axis and on
  // the boundary branch.
  const long top = *std::max_element(sites_.begin(), sites_.end()) + 1;
  double residual = 0.0;
  for (const cd z : {cd(1.7, 0.3), cd(-0.4, 0.05), cd(0.3, 0.0)}) {
    const auto g = [&](long n, long m) {
      return z.imag() == 0.0 ? lattice_green_boundary(n, m, z.real()) : lattice_green(n, m, z);
    };
    for (long m : sites_) {
      for (long n = 1; n <= top; ++n) {
        const cd r = g(n + 1, m) + g(n - 1, m) - z * g(n, m) - (n == m ? 1.0 : 0.0);
        residual = std::max(residual, std::abs(r));
      }
    }
  }
  if (!(residual < 1e-10)) {
    std::ostringstream os;
    os << "lattice Green's function recurrence residual " << residual;
    throw Error(ErrorKind::ResolventIdentityViolation, os.str());
  }
}

Matrix HalfLineLaplacianModel::assemble(const Matrix& green) const { return w_ * green * w_.adjoint(); }

Matrix HalfLineLaplacianModel::T(cd z) const {
  if (z.imag() == 0.0) throw Error(ErrorKind::InvalidArgument, "T(z) needs Im z != 0");
  const cd zeta = lattice_zeta(z);
  const Index m = static_cast<Index>(sites_.size());
  Matrix g(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index k = 0; k < m; ++k) g(i, k) = green_from_zeta(sites_[i], sites_[k], zeta);
  }
  return assemble(g);
}

Matrix HalfLineLaplacianModel::boundary_T(double lambda) const {
  cd zeta;
  try {
    zeta = boundary_zeta(lambda);
  } catch (const Error& e) {
    throw Error(ErrorKind::BoundaryUndefined, e.what());
  }
  const Index m = static_cast<Index>(sites_.size());
  Matrix g(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index k = 0; k < m; ++k) g(i, k) = green_from_zeta(sites_[i], sites_[k], zeta);
  }
  return assemble(g);
}

SpectrumInfo HalfLineLaplacianModel::spectrum_info() const {
  SpectrumInfo info;
  info.intervals.emplace_back(-2.0, 2.0);
  return info;
}

double HalfLineLaplacianModel::t_scale() const {
  return w_.squaredNorm() * linalg::schatten_norm(coupling().J(), 2.0) + 2.0;
}

Matrix HalfLineLaplacianModel::truncated_G(long n) const {
  Matrix g = Matrix::Zero(rank(), n);
  for (std::size_t k = 0; k < sites_.size(); ++k) {
    if (sites_[k] > n) throw Error(ErrorKind::InvalidArgument, "truncation shorter than support");
    g.col(sites_[k] - 1) = w_.col(static_cast<Index>(k));
  }
  return g;
}

}  // namespace ssf::models
