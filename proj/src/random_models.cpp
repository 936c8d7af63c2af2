#include "ssf/random_models.hpp"

#include <algorithm>
#include <numeric>

namespace ssf::random {

using linalg::cd;
using linalg::HermitianMatrix;
using linalg::Index;
using linalg::Matrix;

Matrix gaussian(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = nd(rng);
      m(i, j) = cd(re, nd(rng)) / std::sqrt(2.0);
    }
  }
  return m;
}

HermitianMatrix hermitian(Index n, Rng& rng, double scale) {
  const Matrix g = gaussian(n, n, rng);
  return HermitianMatrix(linalg::hermitian_part(g) * (scale / std::sqrt(static_cast<double>(n))));
}

Matrix unitary(Index n, Rng& rng) {
  const Eigen::HouseholderQR<Matrix> qr(gaussian(n, n, rng));
  Matrix q = qr.householderQ();
  // Fix the phases so the distribution is Haar.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < n; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0.0) q.col(k) *= r(k, k) / a;
  }
  return q;
}

linalg::ProjectionMatrix projection(Index n, Index rank, Rng& rng) {
  const Matrix u = unitary(n, rng).leftCols(rank);
  return linalg::ProjectionMatrix(u * u.adjoint());
}

HermitianMatrix coupling(Index r, Signature sig, Rng& rng) {
  std::uniform_real_distribution<double> mag(0.5, 2.0);
  std::vector<double> d(static_cast<std::size_t>(r));
  for (Index k = 0; k < r; ++k) {
    double s = 1.0;
    if (sig == Signature::Negative) s = -1.0;
    if (sig == Signature::Mixed) s = (k % 2 == 0) ? 1.0 : -1.0;
    d[static_cast<std::size_t>(k)] = s * mag(rng);
  }
  if (sig == Signature::Mixed && r == 1) d[0] = std::bernoulli_distribution(0.5)(rng) ? d[0] : -d[0];
  const Matrix u = unitary(r, rng);
  const Matrix j = u * HermitianMatrix::diagonal(d).matrix() * u.adjoint();
  return HermitianMatrix(linalg::hermitian_part(j));
}

std::shared_ptr<models::DenseModel> dense_model(Index n, Index r, Signature sig, Rng& rng, double g_scale) {
  HermitianMatrix h0 = hermitian(n, rng, 2.0);
  const Matrix g = gaussian(r, n, rng) * (g_scale / std::sqrt(static_cast<double>(n)) * 2.0);
  const std::uint64_t seed = rng();
  return std::make_shared<models::DenseModel>(std::move(h0), g, models::Coupling(coupling(r, sig, rng)), seed);
}

std::shared_ptr<models::HalfLineLaplacianModel> lattice_model(Index r, Signature sig, Rng& rng,
                                                              double w_scale) {
  std::vector<long> sites(static_cast<std::size_t>(r));
  std::iota(sites.begin(), sites.end(), 1L);
  std::shuffle(sites.begin(), sites.end(), rng);
  const Matrix w = gaussian(r, r, rng) * w_scale + Matrix::Identity(r, r) * w_scale;
  return std::make_shared<models::HalfLineLaplacianModel>(std::move(sites), w,
                                                          models::Coupling(coupling(r, sig, rng)));
}

std::vector<double> gap_points(const models::DenseModel& m, double min_width) {
  std::vector<double> e(m.H0_eigenvalues().data(), m.H0_eigenvalues().data() + m.H0_eigenvalues().size());
  e.insert(e.end(), m.H_eigenvalues().data(), m.H_eigenvalues().data() + m.H_eigenvalues().size());
  std::sort(e.begin(), e.end());
  std::vector<double> out{e.front() - 1.0};
  for (std::size_t k = 0; k + 1 < e.size(); ++k) {
    if (e[k + 1] - e[k] > min_width) out.push_back(0.5 * (e[k] + e[k + 1]));
  }
  out.push_back(e.back() + 1.0);
  return out;
}

engine::BoundaryData boundary_data(Index r, Index b_rank, Rng& rng) {
  const Matrix a = hermitian(r, rng, 1.5).matrix();
  const Matrix x = gaussian(r, b_rank, rng);
  const Matrix b = x * x.adjoint();
  const Signature sig = std::bernoulli_distribution(0.5)(rng) ? Signature::Mixed : Signature::Positive;
  return engine::make_boundary_data(a, linalg::hermitian_part(b), coupling(r, sig, rng).matrix());
}

}  // namespace ssf::random
