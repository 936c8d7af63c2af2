#pragma once

// Dense complex kernels: Hermitian and unitary eigenproblems, spectral
// projections, functional calculus, determinants, Hermitian pencils and the
// index of a pair of projections.

#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ssf::linalg {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Self-adjoint matrix.  Construction validates the tolerance and stores the
/// exactly symmetrised entries.
class HermitianMatrix {
 public:
  static constexpr double kDefaultTol = 1e-10;

  explicit HermitianMatrix(const Matrix& entries, double herm_tol = kDefaultTol);

  static HermitianMatrix zero(Index dim);
  static HermitianMatrix identity(Index dim);
  static HermitianMatrix diagonal(const std::vector<double>& values);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double herm_tol() const { return tol_; }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;

 private:
  Matrix m_;
  double tol_;
};

class UnitaryMatrix {
 public:
  static constexpr double kDefaultTol = 1e-8;

  explicit UnitaryMatrix(const Matrix& entries, double unit_tol = kDefaultTol);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

class ProjectionMatrix {
 public:
  static constexpr double kDefaultTol = 1e-9;

  explicit ProjectionMatrix(const Matrix& entries, double proj_tol = kDefaultTol);

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Index rank() const;

 private:
  Matrix m_;
};

struct EigenDecomposition {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns
};

/// Non-negative eigenvalues of A and of -A, each in decreasing order.
struct EigenSequencePair {
  std::vector<double> pos;
  std::vector<double> neg;
};

EigenDecomposition eig_hermitian(const HermitianMatrix& m);

/// Arguments in (0, 2pi) of the eigenvalues of W that are farther than
/// id_tol from 1, ascending, with multiplicity.
std::vector<double> eigenphases(const UnitaryMatrix& w, double id_tol);

/// Orthogonal projection onto the negative spectral subspace of M.  Throws
/// KernelAtZero when an eigenvalue lies in (-zero_tol, zero_tol).
ProjectionMatrix xi_projection(const HermitianMatrix& m, double zero_tol);

/// dim Ker(P-Q-I) - dim Ker(P-Q+I), cross-checked against round(tr(P-Q)).
int fredholm_index(const ProjectionMatrix& p, const ProjectionMatrix& q, double one_tol = 1e-6);

/// f(M) through the spectral decomposition.  DomainViolation when f is not
/// finite at an eigenvalue.
HermitianMatrix apply_scalar_function(const HermitianMatrix& m,
                                      const std::function<double(double)>& f);

/// Determinant by fully pivoted LU elimination.
cd det_complex(const Matrix& m);

struct PencilZero {
  double s;
  int multiplicity;
};

/// Real s in (lo, hi] with Ker(M + sB) nontrivial, found through the
/// Birman-Schwinger operator B^{1/2} M^{-1} B^{1/2} on ran B.  The bounds may
/// be infinite.
std::vector<PencilZero> pencil_real_zeros(const HermitianMatrix& m, const HermitianMatrix& b,
                                          double lo, double hi, double tol = 1e-10);

EigenSequencePair eigenvalue_sequences(const HermitianMatrix& a);

/// l_p distance of two eigenvalue sequences, zero padded to common length.
double sequence_distance(const EigenSequencePair& a, const EigenSequencePair& b, double p);

/// Schatten p-norm; p = infinity gives the operator norm.
double schatten_norm(const HermitianMatrix& a, double p);

// Small helpers shared by the other modules.
Matrix adjoint(const Matrix& m);
double max_abs(const Matrix& m);
Matrix hermitian_part(const Matrix& m);           // (M + M*)/2
Matrix antihermitian_part_over_i(const Matrix& m);  // (M - M*)/(2i)

/// Square root of a positive semidefinite matrix; eigenvalues above -neg_tol
/// are clipped to zero, anything more negative throws InvalidArgument.
Matrix psd_sqrt(const Matrix& b, double neg_tol = 1e-10);

}  // namespace ssf::linalg
