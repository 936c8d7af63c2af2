#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssf/engine.hpp"
#include "ssf/error.hpp"

namespace ssf::engine {

using linalg::Index;

namespace {

struct Sample {
  double alpha;
  linalg::RealVector eig;  // ascending
};

// N(a, b; H): signed count of eigenvalues in [min, max).
int counting(double a, double b, const linalg::RealVector& e) {
  if (a == b) return 0;
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  const int n = static_cast<int>(((e.array() >= lo) && (e.array() < hi)).count());
  return a < b ? n : -n;
}

class RealFlow {
 public:
  RealFlow(const SelfAdjointFamilySampler& family, const std::vector<double>& lambdas,
           const circle::FlowConfig& cfg)
      : family_(family), lambdas_(lambdas), cfg_(cfg), result_(lambdas.size(), 0) {}

  std::vector<int> run() {
    const auto [lo, hi] = family_.window;
    for (double l : lambdas_) {
      if (!(l > lo && l < hi)) {
        std::ostringstream os;
        os << "lambda = " << l << " outside the window (" << lo << ", " << hi << ")";
        throw Error(ErrorKind::InvalidArgument, os.str());
      }
    }
    std::vector<Sample> grid;
    for (int k = 0; k <= cfg_.initial_grid; ++k) {
      grid.push_back(sample(static_cast<double>(k) / cfg_.initial_grid));
    }
    for (const Sample* end : {&grid.front(), &grid.back()}) {
      for (double w : {lo, hi}) {
        if ((end->eig.array() - w).abs().minCoeff() < cfg_.eps_gap) {
          throw Error(ErrorKind::InvalidArgument, "window endpoint is not in the resolvent set");
        }
      }
    }
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) certify(grid[k], grid[k + 1], 0);
    return result_;
  }

 private:
  Sample sample(double alpha) const {
    return {alpha, linalg::eig_hermitian(family_.eval(alpha)).values};
  }

  std::vector<double> candidates(const Sample& a, const Sample& b) const {
    const auto [lo, hi] = family_.window;
    std::vector<double> cuts{lo, hi};
    for (const Sample* s : {&a, &b}) {
      for (Index k = 0; k < s->eig.size(); ++k) {
        if (s->eig(k) > lo && s->eig(k) < hi) cuts.push_back(s->eig(k));
      }
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::pair<double, double>> gaps;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double len = cuts[k + 1] - cuts[k];
      if (len > 2.0 * cfg_.eps_gap) gaps.emplace_back(len, 0.5 * (cuts[k] + cuts[k + 1]));
    }
    std::sort(gaps.begin(), gaps.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    std::vector<double> out;
    for (std::size_t k = 0; k < gaps.size() && k < 4; ++k) out.push_back(gaps[k].second);
    return out;
  }

  bool clear(const Sample& s, double z) const {
    return (s.eig.array() - z).abs().minCoeff() >= cfg_.eps_gap;
  }

  // Sorted eigenvalues move continuously, so the k-th of one sample is joined
  // to the k-th of the next.
  static bool no_crossing(const Sample& a, const Sample& b, double z) {
    for (Index k = 0; k < a.eig.size(); ++k) {
      if ((a.eig(k) - z) * (b.eig(k) - z) < 0.0) return false;
    }
    return true;
  }

  void certify(const Sample& a, const Sample& b, int depth) {
    const Sample mid = sample(0.5 * (a.alpha + b.alpha));
    for (double z : candidates(a, b)) {
      if (clear(a, z) && clear(mid, z) && clear(b, z) && no_crossing(a, mid, z) && no_crossing(mid, b, z)) {
        for (std::size_t i = 0; i < lambdas_.size(); ++i) {
          result_[i] += counting(z, lambdas_[i], b.eig) - counting(z, lambdas_[i], a.eig);
        }
        return;
      }
    }
    if (depth >= cfg_.max_depth) {
      std::ostringstream os;
      os << "no certified gap on alpha in [" << a.alpha << ", " << b.alpha << "]";
      throw Error(ErrorKind::RefinementLimitExceeded, os.str());
    }
    certify(a, mid, depth + 1);
    certify(mid, b, depth + 1);
  }

  const SelfAdjointFamilySampler& family_;
  const std::vector<double>& lambdas_;
  const circle::FlowConfig& cfg_;
  std::vector<int> result_;
};

}  // namespace

std::vector<int> selfadjoint_spectral_flow(const SelfAdjointFamilySampler& family,
                                           const std::vector<double>& lambdas,
                                           const circle::FlowConfig& cfg) {
  if (cfg.initial_grid < 1) throw Error(ErrorKind::InvalidArgument, "initial_grid must be >= 1");
  return RealFlow(family, lambdas, cfg).run();
}

}  // namespace ssf::engine
