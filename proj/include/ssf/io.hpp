#pragma once

// Run configuration and the JSON / CSV artifact formats.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ssf/circle_flow.hpp"
#include "ssf/engine.hpp"
#include "ssf/models.hpp"
#include "ssf/sweep.hpp"

namespace ssf::io {

using nlohmann::json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OutputSpec {
  std::string path;  // empty: stdout
  std::string format = "jsonl";
};

struct RunConfig {
  models::ModelPtr model;
  std::vector<double> lambdas;
  engine::EngineConfig engine;
  std::uint64_t seed = 0;
  OutputSpec output;
};

/// Complex numbers are {"re": x, "im": y}; bare numbers are read as reals.
linalg::cd complex_from_json(const json& j);
json complex_to_json(linalg::cd z);
linalg::Matrix matrix_from_json(const json& j);
json matrix_to_json(const linalg::Matrix& m);

models::ModelPtr model_from_json(const json& cfg, std::uint64_t seed = 0);
std::vector<double> lambda_grid_from_json(const json& j);
void apply_flow_options(const json& j, engine::EngineConfig& cfg);

/// Throws ConfigError on any schema or model-construction problem.
RunConfig parse_run_config(const json& j);
RunConfig load_run_config(const std::string& path);

json step_to_json(const circle::CircleStepFunction& f);
circle::CircleStepFunction step_from_json(const json& j);
json mu_to_json(const engine::MuFunction& mu);
json record_to_json(const SsfRecord& rec);
json det_trace_to_json(const engine::DeterminantTrace& trace);

inline constexpr const char* kCsvHeader = "lambda,xi_det,xi_mu,xi_index,xi_oracle,bk_defect";
std::string record_to_csv(const SsfRecord& rec);

void write_records(std::ostream& os, const std::vector<SsfRecord>& recs, const std::string& format);

}  // namespace ssf::io
