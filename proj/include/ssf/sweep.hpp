#pragma once

// Per-energy SSF records and the sweep over an energy grid.  sweep_serial is
// the reference; sweep_parallel distributes energies over OpenMP threads and
// must reproduce it record for record.

#include <optional>
#include <string>
#include <vector>

#include "ssf/engine.hpp"
#include "ssf/models.hpp"

namespace ssf {

struct SsfRecord {
  double lambda = 0.0;
  std::optional<double> xi_det;
  std::optional<double> xi_mu;
  std::optional<double> xi_index;
  std::optional<int> xi_oracle;  // matrix pairs only
  std::optional<double> bk_defect;
  std::vector<std::string> flags;  // error kinds of skipped parts

  bool operator==(const SsfRecord&) const = default;
};

SsfRecord compute_record(const models::ResolventModel& model, double lambda,
                         const engine::EngineConfig& cfg);

std::vector<SsfRecord> sweep_serial(const models::ResolventModel& model,
                                    const std::vector<double>& lambdas,
                                    const engine::EngineConfig& cfg);

/// jobs <= 0 uses the OpenMP default thread count.
std::vector<SsfRecord> sweep_parallel(const models::ResolventModel& model,
                                      const std::vector<double>& lambdas,
                                      const engine::EngineConfig& cfg, int jobs);

}  // namespace ssf
