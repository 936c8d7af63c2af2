#include "ssf/circle_flow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "ssf/error.hpp"

namespace ssf::circle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double circular_distance(double a, double b) {
  const double d = std::fmod(std::abs(a - b), kTwoPi);
  return std::min(d, kTwoPi - d);
}

double distance_to_one(double phase) { return std::min(phase, kTwoPi - phase); }

// Does the shorter arc from a to b pass through z?  b == 0 stands for the
// point 1.
bool short_arc_contains(double a, double b, double z) {
  double lo = std::min(a, b);
  double hi = std::max(a, b);
  if (hi - lo <= std::numbers::pi) return z > lo && z < hi;
  return z < lo || z > hi;
}

}  // namespace

// ---------------------------------------------------------------------------

CircleStepFunction::CircleStepFunction(std::vector<Jump> jumps, int tail) : tail_(tail) {
  for (const Jump& j : jumps) {
    if (!(j.theta > 0.0 && j.theta < kTwoPi)) {
      std::ostringstream os;
      os << "jump phase " << j.theta << " outside (0, 2pi)";
      throw Error(ErrorKind::InvalidArgument, os.str());
    }
  }
  std::sort(jumps.begin(), jumps.end(), [](const Jump& a, const Jump& b) { return a.theta < b.theta; });
  for (const Jump& j : jumps) {
    if (!jumps_.empty() && j.theta - jumps_.back().theta <= kPhaseMergeTol) {
      jumps_.back().m += j.m;
    } else {
      jumps_.push_back(j);
    }
  }
  std::erase_if(jumps_, [](const Jump& j) { return j.m == 0; });
}

int CircleStepFunction::value_at(double theta) const {
  int v = tail_;
  for (const Jump& j : jumps_) {
    if (j.theta >= theta) v += j.m;
  }
  return v;
}

std::vector<int> CircleStepFunction::piece_values() const {
  std::vector<int> v(jumps_.size() + 1);
  v.back() = tail_;
  for (std::size_t k = jumps_.size(); k > 0; --k) v[k - 1] = v[k] + jumps_[k - 1].m;
  return v;
}

double CircleStepFunction::integral() const {
  const std::vector<int> v = piece_values();
  double acc = 0.0;
  double left = 0.0;
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    acc += v[k] * (jumps_[k].theta - left);
    left = jumps_[k].theta;
  }
  acc += v.back() * (kTwoPi - left);
  return acc;
}

bool CircleStepFunction::is_non_increasing() const {
  return std::all_of(jumps_.begin(), jumps_.end(), [](const Jump& j) { return j.m > 0; });
}

int CircleStepFunction::min_value() const {
  const std::vector<int> v = piece_values();
  return *std::min_element(v.begin(), v.end());
}

int CircleStepFunction::max_value() const {
  const std::vector<int> v = piece_values();
  return *std::max_element(v.begin(), v.end());
}

CircleStepFunction CircleStepFunction::operator+(const CircleStepFunction& o) const {
  std::vector<Jump> all = jumps_;
  all.insert(all.end(), o.jumps_.begin(), o.jumps_.end());
  return CircleStepFunction(std::move(all), tail_ + o.tail_);
}

CircleStepFunction CircleStepFunction::operator-(const CircleStepFunction& o) const {
  std::vector<Jump> all = jumps_;
  for (const Jump& j : o.jumps_) all.push_back({j.theta, -j.m});
  return CircleStepFunction(std::move(all), tail_ - o.tail_);
}

bool CircleStepFunction::equals(const CircleStepFunction& o, double phase_tol) const {
  if (tail_ != o.tail_ || jumps_.size() != o.jumps_.size()) return false;
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    if (jumps_[k].m != o.jumps_[k].m) return false;
    if (std::abs(jumps_[k].theta - o.jumps_[k].theta) > phase_tol) return false;
  }
  return true;
}

CircleStepFunction add_constant(const CircleStepFunction& f, int n) {
  return CircleStepFunction(f.jumps(), f.tail() + n);
}

// ---------------------------------------------------------------------------

NuSequence::NuSequence(int first, std::vector<double> values)
    : first_(first), values_(std::move(values)) {}

double NuSequence::at(int n) const {
  if (n < first_) return kTwoPi;
  if (n >= last()) return 0.0;
  return values_[static_cast<std::size_t>(n - first_)];
}

int NuSequence::value_at(double theta) const {
  int n = first_;
  while (n < last() && !(at(n) < theta)) ++n;
  return n;
}

CircleStepFunction NuSequence::reconstruct() const {
  std::vector<Jump> jumps;
  int tail = first_;
  for (int n = first_; n < last(); ++n) {
    const double v = at(n);
    if (v >= kTwoPi) {
      ++tail;
    } else if (v > 0.0) {
      jumps.push_back({v, 1});
    }
  }
  return CircleStepFunction(std::move(jumps), tail);
}

NuSequence nu_of(const CircleStepFunction& f) {
  const std::vector<int> v = f.piece_values();
  const int lo = *std::min_element(v.begin(), v.end());
  const int hi = *std::max_element(v.begin(), v.end());
  const auto& jumps = f.jumps();
  std::vector<double> values;
  for (int n = lo; n < hi; ++n) {
    // sup({0} U {theta : f(theta) > n}): right end of the last piece above n.
    double sup = 0.0;
    for (std::size_t k = v.size(); k > 0; --k) {
      if (v[k - 1] > n) {
        sup = (k - 1 == jumps.size()) ? kTwoPi : jumps[k - 1].theta;
        break;
      }
    }
    values.push_back(sup);
  }
  return NuSequence(lo, std::move(values));
}

double rho_distance(const CircleStepFunction& f, const CircleStepFunction& g, double p) {
  const NuSequence nf = nu_of(f);
  const NuSequence ng = nu_of(g);
  const int lo = std::min(nf.first(), ng.first());
  const int hi = std::max(nf.last(), ng.last());
  double acc = 0.0;
  for (int n = lo; n < hi; ++n) {
    const double d = std::abs(nf.at(n) - ng.at(n));
    if (std::isinf(p)) {
      acc = std::max(acc, d);
    } else {
      acc += std::pow(d, p);
    }
  }
  return std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
}

// ---------------------------------------------------------------------------

SpectrumClass::SpectrumClass(std::vector<double> phases) : phases_(std::move(phases)) {
  for (double p : phases_) {
    if (!(p > 0.0 && p < kTwoPi)) {
      throw Error(ErrorKind::InvalidArgument, "spectrum phase outside (0, 2pi)");
    }
  }
  std::sort(phases_.begin(), phases_.end());
}

int counting_N(double theta1, double theta2, const SpectrumClass& spec) {
  if (theta1 == theta2) return 0;
  const double lo = std::min(theta1, theta2);
  const double hi = std::max(theta1, theta2);
  const int count = static_cast<int>(std::count_if(spec.phases().begin(), spec.phases().end(),
                                                   [&](double p) { return p >= lo && p < hi; }));
  return theta1 < theta2 ? count : -count;
}

CircleStepFunction counting_function(const SpectrumClass& spec, double z0) {
  // Each phase below z0 is counted for theta <= phase; each phase at or above
  // z0 contributes -1 for theta > phase.
  std::vector<Jump> jumps;
  int tail = 0;
  for (double p : spec.phases()) {
    jumps.push_back({p, 1});
    if (p >= z0) --tail;
  }
  return CircleStepFunction(std::move(jumps), tail);
}

SpectrumClass eta(const linalg::UnitaryMatrix& w, double id_tol) {
  return SpectrumClass(linalg::eigenphases(w, id_tol));
}

namespace {

struct Pairing {
  std::vector<std::pair<double, double>> pairs;  // second == 0 means "the point 1"
  double max_displacement = 0.0;
};

Pairing pair_spectra(const SpectrumClass& a, const SpectrumClass& b) {
  const auto& pa = a.phases();
  const auto& pb = b.phases();
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    for (std::size_t j = 0; j < pb.size(); ++j) cand.emplace_back(circular_distance(pa[i], pb[j]), i, j);
  }
  std::sort(cand.begin(), cand.end());
  std::vector<bool> used_a(pa.size(), false);
  std::vector<bool> used_b(pb.size(), false);
  Pairing out;
  for (const auto& [d, i, j] : cand) {
    if (used_a[i] || used_b[j]) continue;
    // Pair with 1 instead when both phases are nearer to it than to each other.
    if (d > distance_to_one(pa[i]) + distance_to_one(pb[j])) continue;
    used_a[i] = used_b[j] = true;
    out.pairs.emplace_back(pa[i], pb[j]);
    out.max_displacement = std::max(out.max_displacement, d);
  }
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (used_a[i]) continue;
    out.pairs.emplace_back(pa[i], 0.0);
    out.max_displacement = std::max(out.max_displacement, distance_to_one(pa[i]));
  }
  for (std::size_t j = 0; j < pb.size(); ++j) {
    if (used_b[j]) continue;
    out.pairs.emplace_back(pb[j], 0.0);
    out.max_displacement = std::max(out.max_displacement, distance_to_one(pb[j]));
  }
  return out;
}

}  // namespace

double spectrum_distance(const SpectrumClass& a, const SpectrumClass& b) {
  return pair_spectra(a, b).max_displacement;
}

// ---------------------------------------------------------------------------

namespace {

struct Node {
  double t;
  SpectrumClass spec;
};

class FlowEngine {
 public:
  FlowEngine(const UnitaryPathSampler& path, const FlowConfig& cfg, FlowDiagnostics* diag)
      : path_(path), cfg_(cfg), diag_(diag) {}

  CircleStepFunction run() {
    if (cfg_.initial_grid < 1 || !(cfg_.eps_gap > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "flow config needs initial_grid >= 1 and eps_gap > 0");
    }
    std::vector<Node> grid = approach(false);
    std::reverse(grid.begin(), grid.end());
    for (int k = 1; k < cfg_.initial_grid; ++k) {
      const double t = static_cast<double>(k) / cfg_.initial_grid;
      grid.push_back({t, sample(t)});
    }
    for (Node& n : approach(true)) grid.push_back(std::move(n));

    for (std::size_t k = 0; k + 1 < grid.size(); ++k) certify(grid[k], grid[k + 1], 0);
    return result_;
  }

 private:
  SpectrumClass sample(double t) {
    ++evaluations_;
    if (diag_) diag_->evaluations = evaluations_;
    return eta(path_.eval(t), cfg_.id_tol);
  }

  // Geometric samples t = h or 1 - h, h = 2^-k / initial_grid, walking towards
  // the endpoint until the spectrum has settled on its limit.  The limit node
  // comes last.
  std::vector<Node> approach(bool at_one) {
    const std::optional<SpectrumClass>& given = at_one ? path_.limit_at_1 : path_.limit_at_0;
    const double settle_tol = 0.1 * cfg_.max_step;
    std::vector<Node> nodes;
    for (int k = 1; k <= cfg_.endpoint_max_halvings; ++k) {
      const double h = std::ldexp(1.0, -k) / cfg_.initial_grid;
      const double t = at_one ? 1.0 - h : h;
      if (t <= 0.0 || t >= 1.0) break;
      nodes.push_back({t, sample(t)});
      const SpectrumClass& cur = nodes.back().spec;
      if (at_one ? t < path_.settled_above : t > path_.settled_below) continue;
      if (given) {
        if (spectrum_distance(cur, *given) < settle_tol) {
          nodes.push_back({at_one ? 1.0 : 0.0, *given});
          return nodes;
        }
      } else if (nodes.size() > 1 && spectrum_distance(nodes[nodes.size() - 2].spec, cur) < cfg_.endpoint_tol) {
        std::vector<double> kept;
        for (double p : cur.phases()) {
          if (distance_to_one(p) >= 10.0 * cfg_.endpoint_tol) kept.push_back(p);
        }
        nodes.push_back({at_one ? 1.0 : 0.0, SpectrumClass(std::move(kept))});
        return nodes;
      }
    }
    std::ostringstream os;
    os << "spectrum has no limit as t -> " << (at_one ? "1-" : "0+");
    throw Error(ErrorKind::EndpointDivergence, os.str());
  }

  // Candidate gap phases: midpoints of the widest arcs cut out by the union of
  // the endpoint spectra and the point 1.
  std::vector<double> gap_candidates(const Node& a, const Node& b) const {
    std::vector<double> cuts = a.spec.phases();
    cuts.insert(cuts.end(), b.spec.phases().begin(), b.spec.phases().end());
    cuts.push_back(0.0);
    cuts.push_back(kTwoPi);
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::pair<double, double>> arcs;  // (length, midpoint)
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double len = cuts[k + 1] - cuts[k];
      if (len > 2.0 * cfg_.eps_gap) arcs.emplace_back(len, 0.5 * (cuts[k] + cuts[k + 1]));
    }
    std::sort(arcs.begin(), arcs.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    std::vector<double> out;
    for (std::size_t k = 0; k < arcs.size() && k < 4; ++k) out.push_back(arcs[k].second);
    return out;
  }

  bool clear_of(const SpectrumClass& s, double z) const {
    return std::all_of(s.phases().begin(), s.phases().end(),
                       [&](double p) { return circular_distance(p, z) >= cfg_.eps_gap; });
  }

  // Consecutive checked samples must be joinable without any phase passing z.
  static bool no_crossing(const Pairing& pr, double z) {
    return std::none_of(pr.pairs.begin(), pr.pairs.end(),
                        [&](const auto& p) { return short_arc_contains(p.first, p.second, z); });
  }

  void certify(const Node& a, const Node& b, int depth) {
    const Node mid{0.5 * (a.t + b.t), sample(0.5 * (a.t + b.t))};
    const Pairing left = pair_spectra(a.spec, mid.spec);
    const Pairing right = pair_spectra(mid.spec, b.spec);
    const double step = std::max(left.max_displacement, right.max_displacement);
    for (double z : step <= cfg_.max_step ? gap_candidates(a, b) : std::vector<double>{}) {
      if (clear_of(a.spec, z) && clear_of(mid.spec, z) && clear_of(b.spec, z) && no_crossing(left, z) &&
          no_crossing(right, z)) {
        if (diag_) diag_->max_pair_displacement = std::max(diag_->max_pair_displacement, step);
        result_ = result_ + (counting_function(b.spec, z) - counting_function(a.spec, z));
        if (diag_) diag_->pieces.push_back({a.t, b.t, z});
        return;
      }
    }
    if (depth >= cfg_.max_depth) {
      std::ostringstream os;
      os << "no certified gap on [" << a.t << ", " << b.t << "] at depth " << depth;
      throw Error(ErrorKind::RefinementLimitExceeded, os.str());
    }
    certify(a, mid, depth + 1);
    certify(mid, b, depth + 1);
  }

  const UnitaryPathSampler& path_;
  const FlowConfig& cfg_;
  FlowDiagnostics* diag_;
  CircleStepFunction result_;
  int evaluations_ = 0;
};

}  // namespace

CircleStepFunction spectral_flow(const UnitaryPathSampler& path, const FlowConfig& cfg,
                                 FlowDiagnostics* diag) {
  if (diag) *diag = FlowDiagnostics{};
  return FlowEngine(path, cfg, diag).run();
}

}  // namespace ssf::circle
