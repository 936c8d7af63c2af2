#pragma once

// Integer step functions on the punctured unit circle, their nu-sequences
// and metrics, spectra of unitary matrices as points of the quotient space,
// and the spectral flow of a sampled path of unitaries.

#include <functional>
#include <optional>
#include <vector>

#include "ssf/linalg.hpp"

namespace ssf::circle {

/// Phases closer than this are one jump point.
inline constexpr double kPhaseMergeTol = 1e-8;

struct Jump {
  double theta;  // in (0, 2pi)
  int m;         // nonzero
};

/// Left-continuous integer step function on (0, 2pi):
///   value(theta) = tail + sum over jumps with theta_j >= theta of m_j.
class CircleStepFunction {
 public:
  CircleStepFunction() = default;
  CircleStepFunction(std::vector<Jump> jumps, int tail);

  const std::vector<Jump>& jumps() const { return jumps_; }
  int tail() const { return tail_; }

  int value_at(double theta) const;
  /// Integral over (0, 2pi), exact for the step function.
  double integral() const;
  bool is_non_increasing() const;
  int min_value() const;
  int max_value() const;

  /// Interval values v_0..v_K on (0,t_1], (t_1,t_2], ..., (t_K, 2pi).
  std::vector<int> piece_values() const;

  CircleStepFunction operator+(const CircleStepFunction& o) const;
  CircleStepFunction operator-(const CircleStepFunction& o) const;

  /// Same integer values everywhere, jump phases matched within phase_tol.
  bool equals(const CircleStepFunction& o, double phase_tol = kPhaseMergeTol) const;

 private:
  std::vector<Jump> jumps_;
  int tail_ = 0;
};

CircleStepFunction add_constant(const CircleStepFunction& f, int n);

/// nu(n; f) for n in [first, first + size); nu = 2pi below that range and 0
/// above it.
class NuSequence {
 public:
  NuSequence(int first, std::vector<double> values);

  double at(int n) const;
  int first() const { return first_; }
  int last() const { return first_ + static_cast<int>(values_.size()); }  // exclusive

  /// f(theta) = inf{ n : nu(n) < theta }.
  int value_at(double theta) const;
  CircleStepFunction reconstruct() const;

 private:
  int first_;
  std::vector<double> values_;
};

NuSequence nu_of(const CircleStepFunction& f);

/// l_p norm of the nu-difference; p may be 1, 2 or infinity.
double rho_distance(const CircleStepFunction& f, const CircleStepFunction& g, double p);

/// Finite multiset of phases in (0, 2pi), ascending.
class SpectrumClass {
 public:
  SpectrumClass() = default;
  explicit SpectrumClass(std::vector<double> phases);

  const std::vector<double>& phases() const { return phases_; }
  bool empty() const { return phases_.empty(); }
  std::size_t size() const { return phases_.size(); }

 private:
  std::vector<double> phases_;
};

/// Signed count of phases in the half-open arc between theta1 and theta2.
int counting_N(double theta1, double theta2, const SpectrumClass& spec);

/// theta -> N(theta, z0; spec) as a step function.
CircleStepFunction counting_function(const SpectrumClass& spec, double z0);

SpectrumClass eta(const linalg::UnitaryMatrix& w, double id_tol);

/// Largest displacement of a greedy nearest-phase pairing on the circle;
/// phases left unpaired are matched with the point 1.  Diagnostic only.
double spectrum_distance(const SpectrumClass& a, const SpectrumClass& b);

struct FlowConfig {
  int initial_grid = 16;
  int max_depth = 40;
  double eps_gap = 1e-3;
  double id_tol = 1e-9;
  double endpoint_tol = 1e-6;
  int endpoint_max_halvings = 60;
  double max_step = 0.5;  // largest phase displacement accepted between checked samples
};

struct UnitaryPathSampler {
  std::function<linalg::UnitaryMatrix(double)> eval;  // t in (0, 1)
  std::optional<SpectrumClass> limit_at_0;
  std::optional<SpectrumClass> limit_at_1;
  // The endpoint walk may only stop once t <= settled_below (near 0) or
  // t >= settled_above (near 1); paths that know their slow scales set these.
  double settled_below = 1.0;
  double settled_above = 0.0;
};

struct FlowPiece {
  double t_begin;
  double t_end;
  double gap;
};

struct FlowDiagnostics {
  std::vector<FlowPiece> pieces;
  int evaluations = 0;
  double max_pair_displacement = 0.0;
};

/// Spectral flow through every point of the circle, summed over a certified
/// partition: on each piece a gap phase stays eps_gap away from all checked
/// eigenphases.
CircleStepFunction spectral_flow(const UnitaryPathSampler& path, const FlowConfig& cfg,
                                 FlowDiagnostics* diag = nullptr);

}  // namespace ssf::circle
