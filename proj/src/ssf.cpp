#include <algorithm>
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
constexpr double kAnchorTol = 1e-6;
constexpr double kAnchorCeiling = 1e15;

cd det_of_symbol(const models::ResolventModel& model, const Matrix& t) {
  const Index r = model.rank();
  return linalg::det_complex(Matrix::Identity(r, r) + model.coupling().J().matrix() * t);
}

}  // namespace

cd perturbation_determinant(const models::ResolventModel& model, cd z) {
  return det_of_symbol(model, model.T(z));
}

cd perturbation_determinant_boundary(const models::ResolventModel& model, double lambda) {
  return det_of_symbol(model, model.boundary_T(lambda));
}

namespace {

class ArgTracker {
 public:
  ArgTracker(const models::ResolventModel& model, double lambda, int max_depth, DeterminantTrace& out)
      : model_(model), lambda_(lambda), max_depth_(max_depth), out_(out) {}

  cd eval(double y) const {
    if (y == 0.0) return perturbation_determinant_boundary(model_, lambda_);
    return perturbation_determinant(model_, cd(lambda_, y));
  }

  // Advances the continuous argument from (ya, Da) to yb, halving the step
  // whenever the principal increment exceeds pi/2.
  cd advance(double ya, cd da, double yb, cd db, int depth) {
    const double step = std::arg(db / da);
    if (std::abs(step) <= 0.5 * std::numbers::pi) {
      arg_ += step;
      out_.rows.push_back({yb, db, arg_});
      return db;
    }
    if (depth >= max_depth_) {
      std::ostringstream os;
      os << "argument jump " << step << " between y = " << ya << " and y = " << yb
         << " survives " << depth << " refinements";
      throw Error(ErrorKind::UnwindFailure, os.str());
    }
    const double ym = yb == 0.0 ? 0.5 * ya : std::sqrt(ya * yb);
    const cd dm = eval(ym);
    advance(ya, da, ym, dm, depth + 1);
    return advance(ym, dm, yb, db, depth + 1);
  }

  void set_arg(double a) { arg_ = a; }
  double arg() const { return arg_; }

 private:
  const models::ResolventModel& model_;
  double lambda_;
  int max_depth_;
  DeterminantTrace& out_;
  double arg_ = 0.0;
};

}  // namespace

DeterminantTrace determinant_trace(const models::ResolventModel& model, double lambda,
                                   const EngineConfig& cfg) {
  if (!(cfg.grid_ratio > 0.0 && cfg.grid_ratio < 1.0) || !(cfg.y_min > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "determinant grid needs 0 < ratio < 1 and y_min > 0");
  }
  DeterminantTrace out;
  out.lambda = lambda;
  ArgTracker tracker(model, lambda, cfg.det_max_depth, out);

  // Anchor: far enough up that D is within 1e-6 of 1, so arg D starts at 0.
  const bool automatic = !(cfg.y_max > 0.0);
  double y = automatic ? 1e3 * (1.0 + model.t_scale()) : cfg.y_max;
  cd d = tracker.eval(y);
  while (std::abs(d - 1.0) >= kAnchorTol) {
    if (!automatic || y * 10.0 > kAnchorCeiling) {
      std::ostringstream os;
      os << "|D - 1| = " << std::abs(d - 1.0) << " at y = " << y;
      throw Error(ErrorKind::AnchorNotReached, os.str());
    }
    y *= 10.0;
    d = tracker.eval(y);
  }
  out.y_max = y;
  tracker.set_arg(std::arg(d));
  out.rows.push_back({y, d, tracker.arg()});

  while (y * cfg.grid_ratio >= cfg.y_min) {
    const double next = y * cfg.grid_ratio;
    d = tracker.advance(y, d, next, tracker.eval(next), 0);
    y = next;
  }
  const cd boundary = tracker.eval(0.0);
  if (std::abs(boundary) <= 1e-14) {
    std::ostringstream os;
    os << "D(lambda + i0) vanishes at lambda = " << lambda;
    throw Error(ErrorKind::NonInvertibleSymbol, os.str());
  }
  tracker.advance(y, d, 0.0, boundary, 0);
  out.xi = tracker.arg() / std::numbers::pi;
  return out;
}

double ssf_via_determinant(const models::ResolventModel& model, double lambda, const EngineConfig& cfg) {
  return determinant_trace(model, lambda, cfg).xi;
}

double birman_krein_defect(const BoundaryData& data, const EngineConfig& cfg) {
  const cd det_s = linalg::det_complex(scattering_matrix(data, cfg).matrix());
  const double xi = ssf_index_integral(data, cfg);
  return std::abs(det_s - std::polar(1.0, -kTwoPi * xi));
}

double birman_krein_defect(const models::ResolventModel& model, double lambda, const EngineConfig& cfg) {
  return birman_krein_defect(boundary_data(model, lambda), cfg);
}

// ---------------------------------------------------------------------------

int counting_ssf_oracle(const HermitianMatrix& H0, const HermitianMatrix& H, double lambda) {
  const linalg::RealVector e0 = linalg::eig_hermitian(H0).values;
  const linalg::RealVector e = linalg::eig_hermitian(H).values;
  const double scale = std::max({1.0, e0.cwiseAbs().maxCoeff(), e.cwiseAbs().maxCoeff()});
  const double dist = std::min((e0.array() - lambda).abs().minCoeff(), (e.array() - lambda).abs().minCoeff());
  if (dist <= 1e-9 * scale) {
    std::ostringstream os;
    os << "lambda = " << lambda << " is an eigenvalue";
    throw Error(ErrorKind::EigenvalueAtLambda, os.str());
  }
  return static_cast<int>((e0.array() < lambda).count() - (e.array() < lambda).count());
}

TestFunction polynomial_test_function(int degree) {
  if (degree < 0) throw Error(ErrorKind::InvalidArgument, "polynomial degree must be >= 0");
  TestFunction f;
  f.phi = [degree](double x) { return std::pow(x, degree); };
  f.dphi = [degree](double x) { return degree == 0 ? 0.0 : degree * std::pow(x, degree - 1); };
  const double inf = std::numeric_limits<double>::infinity();
  f.support = {-inf, inf};
  return f;
}

TestFunction bump_test_function(double center, double half_width) {
  if (!(half_width > 0.0)) throw Error(ErrorKind::InvalidArgument, "bump half width must be positive");
  TestFunction f;
  f.phi = [=](double x) {
    const double u = (x - center) / half_width;
    return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
  };
  f.dphi = [=](double x) {
    const double u = (x - center) / half_width;
    if (std::abs(u) >= 1.0) return 0.0;
    const double w = 1.0 - u * u;
    return std::exp(-1.0 / w) * (-2.0 * u / (w * w)) / half_width;
  };
  f.support = {center - half_width, center + half_width};
  return f;
}

double trace_formula_defect(const HermitianMatrix& H0, const HermitianMatrix& H, const TestFunction& f) {
  const double lhs = linalg::apply_scalar_function(H, f.phi).matrix().trace().real() -
                     linalg::apply_scalar_function(H0, f.phi).matrix().trace().real();

  const linalg::RealVector e0 = linalg::eig_hermitian(H0).values;
  const linalg::RealVector e = linalg::eig_hermitian(H).values;
  std::vector<double> cuts(e0.data(), e0.data() + e0.size());
  cuts.insert(cuts.end(), e.data(), e.data() + e.size());
  std::sort(cuts.begin(), cuts.end());
  const auto [lo, hi] = f.support;
  std::vector<double> clipped;
  for (double c : cuts) clipped.push_back(std::clamp(c, lo, hi));

  // xi is constant between consecutive eigenvalues, so the integral of
  // phi' xi is a sum of phi differences.
  double rhs = 0.0;
  for (std::size_t k = 0; k + 1 < clipped.size(); ++k) {
    const double a = clipped[k];
    const double b = clipped[k + 1];
    if (!(b > a)) continue;
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    const long xi = (e0.array() < mid).count() - (e.array() < mid).count();
    rhs += static_cast<double>(xi) * (f.phi(b) - f.phi(a));
  }
  return std::abs(lhs - rhs);
}

std::vector<double> theta_samples(const std::vector<const CircleStepFunction*>& fs, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(kTwoPi * (k + 0.5) / count);
  for (const CircleStepFunction* f : fs) {
    double left = 0.0;
    for (const circle::Jump& j : f->jumps()) {
      out.push_back(0.5 * (left + j.theta));
      left = j.theta;
    }
    out.push_back(0.5 * (left + kTwoPi));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

int signed_count(double a, double b, const linalg::RealVector& e) {
  if (a == b) return 0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  const int n = static_cast<int>(((e.array() >= lo) && (e.array() < hi)).count());
  return a < b ? n : -n;
}

}  // namespace

int gap_mu_relation_defect(const models::DenseModel& model, double lambda1, double lambda2,
                           const EngineConfig& cfg) {
  const MuFunction mu1 = mu_via_flow(model, lambda1, cfg);
  const MuFunction mu2 = mu_via_flow(model, lambda2, cfg);
  const int n_diff = signed_count(lambda1, lambda2, model.H_eigenvalues()) -
                     signed_count(lambda1, lambda2, model.H0_eigenvalues());
  int defect = 0;
  for (double theta : theta_samples({&mu1.step, &mu2.step}, cfg.theta_samples)) {
    const int d = (mu2.step.value_at(theta) - mu1.step.value_at(theta)) - n_diff;
    defect = std::max(defect, std::abs(d));
  }
  return defect;
}

InvarianceResult invariance_defect(const models::ModelPtr& model, const models::MoebiusMap& f,
                                   double lambda, const EngineConfig& cfg) {
  const models::Pushforward pushed = models::moebius_pushforward(model, f);
  const MuFunction original = mu_via_index(*model, lambda, cfg);
  const MuFunction transformed = mu_via_flow(*pushed.model, f(lambda), cfg);
  InvarianceResult res;
  res.identity_residual = pushed.identity_residual;
  for (double theta : theta_samples({&original.step, &transformed.step}, cfg.theta_samples)) {
    res.defect = std::max(res.defect, std::abs(original.step.value_at(theta) - transformed.step.value_at(theta)));
  }
  return res;
}

}  // namespace ssf::engine
