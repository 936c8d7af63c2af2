#pragma once

// Operator models that supply the sandwiched resolvent T(z) = G (H0 - z)^{-1} G*
// and its boundary values from the upper half-plane.

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ssf/linalg.hpp"

namespace ssf::models {

using linalg::cd;
using linalg::HermitianMatrix;
using linalg::Index;
using linalg::Matrix;

struct SpectrumInfo {
  std::vector<std::pair<double, double>> intervals;  // absolutely continuous part
  std::vector<double> points;                        // eigenvalues of H0
  double lower() const;
  double upper() const;
};

/// The coupling J of V = G* J G, with its inverse cached.
class Coupling {
 public:
  static constexpr double kDefaultInvTol = 1e-10;

  explicit Coupling(HermitianMatrix j, double j_inv_tol = kDefaultInvTol);

  const HermitianMatrix& J() const { return j_; }
  const HermitianMatrix& J_inv() const { return j_inv_; }
  Index rank() const { return j_.dim(); }

 private:
  HermitianMatrix j_;
  HermitianMatrix j_inv_;
};

class DenseModel;

class ResolventModel {
 public:
  virtual ~ResolventModel() = default;

  Index rank() const { return coupling_.rank(); }
  const Coupling& coupling() const { return coupling_; }

  /// T(z) for Im z != 0.
  virtual Matrix T(cd z) const = 0;
  /// T(lambda + i0); throws BoundaryUndefined outside the boundary-value domain.
  virtual Matrix boundary_T(double lambda) const = 0;
  virtual SpectrumInfo spectrum_info() const = 0;
  /// Rough size of T used to place the determinant anchor.
  virtual double t_scale() const = 0;
  virtual const DenseModel* as_dense() const { return nullptr; }

 protected:
  explicit ResolventModel(Coupling c) : coupling_(std::move(c)) {}

 private:
  Coupling coupling_;
};

using ModelPtr = std::shared_ptr<const ResolventModel>;

/// A = Re T(lambda+i0), B = Im T(lambda+i0) with B clipped to be PSD.
struct BoundaryAB {
  HermitianMatrix A;
  HermitianMatrix B;
};

BoundaryAB AB_boundary(const ResolventModel& model, double lambda);

/// H0 Hermitian n x n, G r x n, H = H0 + G* J G.
class DenseModel final : public ResolventModel {
 public:
  DenseModel(HermitianMatrix h0, Matrix g, Coupling j, std::uint64_t seed = 0);

  Matrix T(cd z) const override;
  Matrix boundary_T(double lambda) const override;
  SpectrumInfo spectrum_info() const override;
  double t_scale() const override;
  const DenseModel* as_dense() const override { return this; }

  const HermitianMatrix& H0() const { return h0_; }
  const HermitianMatrix& H() const { return h_; }
  const Matrix& G() const { return g_; }
  const linalg::RealVector& H0_eigenvalues() const { return h0_eig_.values; }
  const linalg::RealVector& H_eigenvalues() const { return h_eig_.values; }

  /// Largest residual of the resolvent identity at the construction samples.
  double resolvent_identity_residual() const { return identity_residual_; }

  /// (H - zbar)(H - z)^{-1} (H0 - z)(H0 - zbar)^{-1} through the spectral
  /// decompositions of H and H0.
  linalg::UnitaryMatrix M_of_z(cd z) const;
  /// The same operator assembled from G, J and T(z) only.
  Matrix M_factorized(cd z) const;

 private:
  HermitianMatrix h0_;
  Matrix g_;
  HermitianMatrix h_;
  linalg::EigenDecomposition h0_eig_;
  linalg::EigenDecomposition h_eig_;
  Matrix g_v_;  // G times the eigenvectors of H0
  double identity_residual_ = 0.0;
};

/// H = H0 + G* J G built and checked against the resolvent identity.
HermitianMatrix build_H(const DenseModel& model);

/// Green's function of (Hu)(n) = u(n+1) + u(n-1) on n >= 1 with u(0) = 0.
cd lattice_green(long n, long m, cd z);
/// Boundary value from the upper half-plane; BranchAtThreshold at +-2.
cd lattice_green_boundary(long n, long m, double lambda);
/// Root of zeta + 1/zeta = z with |zeta| < 1.
cd lattice_zeta(cd z);

/// Half-line discrete Laplacian perturbed on finitely many sites:
/// G = W E_S where E_S restricts to the sites and W is r x |S|.
class HalfLineLaplacianModel final : public ResolventModel {
 public:
  HalfLineLaplacianModel(std::vector<long> sites, Matrix weights, Coupling j);

  Matrix T(cd z) const override;
  Matrix boundary_T(double lambda) const override;
  SpectrumInfo spectrum_info() const override;
  double t_scale() const override;

  const std::vector<long>& sites() const { return sites_; }
  const Matrix& weights() const { return w_; }

  /// Dense G of the lattice truncated to sites 1..n.
  Matrix truncated_G(long n) const;

 private:
  Matrix assemble(const Matrix& green) const;

  std::vector<long> sites_;
  Matrix w_;
};

struct MoebiusMap {
  enum class Kind { Affine, InverseShift };

  Kind kind = Kind::Affine;
  double a = 1.0;
  double b = 0.0;
  double lambda0 = 0.0;

  static MoebiusMap affine(double a, double b);
  static MoebiusMap inverse_shift(double lambda0);

  double operator()(double x) const;
  double derivative(double x) const;
  /// Preimage of w; complex arguments map the upper half-plane to itself.
  cd preimage(cd w) const;
  double preimage(double w) const;
};

/// T computed for (f(H0), f(H)) from the original model.
class TransformedModel final : public ResolventModel {
 public:
  TransformedModel(ModelPtr base, MoebiusMap f);

  Matrix T(cd z) const override;
  Matrix boundary_T(double lambda) const override;
  SpectrumInfo spectrum_info() const override;
  double t_scale() const override;

  const ResolventModel& base() const { return *base_; }
  const MoebiusMap& map() const { return f_; }

 private:
  static Coupling pushed_coupling(const ResolventModel& base, const MoebiusMap& f);

  ModelPtr base_;
  MoebiusMap f_;
  Matrix t_shift_;  // T(lambda0) for the inverse shift, zero otherwise
};

struct Pushforward {
  ModelPtr model;
  /// Largest residual of the pushforward identities at the sampled points.
  double identity_residual = 0.0;
};

/// Factored data of (f(H0), f(H)).  Dense inputs give a DenseModel built from
/// f(H0) directly; other models are wrapped.  Throws AdmissibilityViolation
/// for a <= 0 or when lambda0 is not strictly outside the spectra.
Pushforward moebius_pushforward(const ModelPtr& model, const MoebiusMap& f, std::uint64_t seed = 0);

struct ConditionReport {
  bool pass = false;
  bool derivative_positive = false;
  double derivative = 0.0;
  std::vector<std::pair<double, double>> separation;  // (delta, sampled infimum)
  std::vector<std::string> violations;
};

/// f'(lambda) > 0 and inf |f(x) - f(lambda)| > 0 over Omega minus a ball.
ConditionReport validate_condition_a1(const MoebiusMap& f, std::pair<double, double> omega,
                                      double lambda);

}  // namespace ssf::models
