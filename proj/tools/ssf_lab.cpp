// ssf-lab: spectral shift function sweeps, mu functions, determinant traces
// and property-check suites.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "ssf/checks.hpp"
#include "ssf/engine.hpp"
#include "ssf/error.hpp"
#include "ssf/io.hpp"
#include "ssf/sweep.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kConfigError = 2;

struct Overrides {
  std::optional<double> eps_gap, y_max, y_min, grid_ratio, zero_tol, inv_tol, id_tol;
  std::optional<int> max_depth, initial_grid;

  void apply(ssf::engine::EngineConfig& cfg) const {
    if (eps_gap) cfg.flow.eps_gap = *eps_gap;
    if (max_depth) cfg.flow.max_depth = *max_depth;
    if (initial_grid) cfg.flow.initial_grid = *initial_grid;
    if (id_tol) cfg.flow.id_tol = *id_tol;
    if (y_max) cfg.y_max = *y_max;
    if (y_min) cfg.y_min = *y_min;
    if (grid_ratio) cfg.grid_ratio = *grid_ratio;
    if (zero_tol) cfg.zero_tol = *zero_tol;
    if (inv_tol) cfg.inv_tol = *inv_tol;
  }
};

void add_overrides(CLI::App& app, Overrides& o) {
  app.add_option("--eps-gap", o.eps_gap, "gap certification margin")->check(CLI::PositiveNumber);
  app.add_option("--max-depth", o.max_depth, "flow bisection depth limit");
  app.add_option("--initial-grid", o.initial_grid, "initial flow grid intervals")->check(CLI::PositiveNumber);
  app.add_option("--id-tol", o.id_tol, "tolerance for the identity at path limits");
  app.add_option("--y-max", o.y_max, "determinant anchor height (0 = automatic)");
  app.add_option("--y-min", o.y_min, "lowest height of the determinant grid");
  app.add_option("--grid-ratio", o.grid_ratio, "geometric ratio of the determinant grid")
      ->check(CLI::Range(1e-6, 1.0 - 1e-6));
  app.add_option("--zero-tol", o.zero_tol, "spectral projection zero guard");
  app.add_option("--inv-tol", o.inv_tol, "invertibility threshold for J^-1 + T");
}

ssf::io::RunConfig load(const std::string& path, const Overrides& o) {
  ssf::io::RunConfig rc = ssf::io::load_run_config(path);
  o.apply(rc.engine);
  return rc;
}

void report_error(const ssf::Error& e) {
  nlohmann::json j{{"error", std::string(ssf::to_string(e.kind()))}, {"message", e.what()}};
  std::cerr << j.dump() << '\n';
}

int default_jobs() {
  if (const char* env = std::getenv("SSF_LAB_JOBS")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      throw ssf::io::ConfigError(std::string("SSF_LAB_JOBS is not an integer: ") + env);
    }
  }
  return 0;
}

int cmd_ssf(const std::string& config, const std::string& out, const std::string& format, std::optional<int> jobs,
            const Overrides& o) {
  ssf::io::RunConfig rc = load(config, o);
  if (!out.empty()) rc.output.path = out;
  if (!format.empty()) rc.output.format = format;
  if (rc.lambdas.empty()) throw ssf::io::ConfigError("config has no lambda_grid");
  const int n_jobs = jobs ? *jobs : default_jobs();
  const auto records = ssf::sweep_parallel(*rc.model, rc.lambdas, rc.engine, n_jobs);
  if (rc.output.path.empty()) {
    ssf::io::write_records(std::cout, records, rc.output.format);
  } else {
    std::ofstream os(rc.output.path);
    if (!os) throw ssf::io::ConfigError("cannot write " + rc.output.path);
    ssf::io::write_records(os, records, rc.output.format);
  }
  return kOk;
}

int cmd_mu(const std::string& config, double lambda, const std::string& method, const Overrides& o) {
  const ssf::io::RunConfig rc = load(config, o);
  try {
    if (method == "flow") {
      std::cout << ssf::io::mu_to_json(ssf::engine::mu_via_flow(*rc.model, lambda, rc.engine)).dump() << '\n';
      return kOk;
    }
    if (method == "index") {
      std::cout << ssf::io::mu_to_json(ssf::engine::mu_via_index(*rc.model, lambda, rc.engine)).dump() << '\n';
      return kOk;
    }
    const auto flow = ssf::engine::mu_via_flow(*rc.model, lambda, rc.engine);
    const auto index = ssf::engine::mu_via_index(*rc.model, lambda, rc.engine);
    const bool equal = flow.step.equals(index.step, rc.engine.phase_tol);
    nlohmann::json j{{"lambda", lambda},
                     {"flow", ssf::io::mu_to_json(flow)},
                     {"index", ssf::io::mu_to_json(index)},
                     {"equal", equal}};
    std::cout << j.dump() << '\n';
    if (!equal) {
      report_error(ssf::Error(ssf::ErrorKind::MethodDisagreement, "mu via flow and via index differ"));
      return kFailure;
    }
    return kOk;
  } catch (const ssf::Error& e) {
    report_error(e);
    return kFailure;
  }
}

int cmd_det(const std::string& config, double lambda, const Overrides& o) {
  const ssf::io::RunConfig rc = load(config, o);
  try {
    std::cout << ssf::io::det_trace_to_json(ssf::engine::determinant_trace(*rc.model, lambda, rc.engine)).dump()
              << '\n';
    return kOk;
  } catch (const ssf::Error& e) {
    report_error(e);
    return kFailure;
  }
}

int cmd_check(const std::string& suite, std::uint64_t seed) {
  ssf::checks::CheckReport rep;
  try {
    rep = ssf::checks::run_suite(suite, seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  }
  std::cout << ssf::checks::report_to_json(rep).dump(2) << '\n';
  return rep.passed() ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral shift function and spectral flow laboratory"};
  app.require_subcommand(1);

  std::string config, out, format, method = "both", suite;
  std::optional<int> jobs;
  double lambda = 0.0;
  std::uint64_t seed = 1;
  Overrides o;

  CLI::App* ssf_cmd = app.add_subcommand("ssf", "sweep xi over the lambda grid of a config");
  ssf_cmd->add_option("--config", config, "run configuration (JSON)")->required();
  ssf_cmd->add_option("--out", out, "output file (default stdout)");
  ssf_cmd->add_option("--format", format, "jsonl or csv")->check(CLI::IsMember({"jsonl", "csv"}));
  ssf_cmd->add_option("--jobs", jobs, "worker threads (default SSF_LAB_JOBS, else all cores)");
  add_overrides(*ssf_cmd, o);

  CLI::App* mu_cmd = app.add_subcommand("mu", "mu(theta; lambda) as a step function");
  mu_cmd->add_option("--config", config, "run configuration (JSON)")->required();
  mu_cmd->add_option("--lambda", lambda, "energy")->required();
  mu_cmd->add_option("--method", method, "flow, index or both")->check(CLI::IsMember({"flow", "index", "both"}));
  add_overrides(*mu_cmd, o);

  CLI::App* det_cmd = app.add_subcommand("det", "perturbation determinant trace down to lambda + i0");
  det_cmd->add_option("--config", config, "run configuration (JSON)")->required();
  det_cmd->add_option("--lambda", lambda, "energy")->required();
  add_overrides(*det_cmd, o);

  CLI::App* check_cmd = app.add_subcommand("check", "run a property-check suite");
  check_cmd->add_option("--suite", suite, "index, flow, lidski, e-lemmas, bk, invariance, gaps, trace or all")
      ->required();
  check_cmd->add_option("--seed", seed, "seed for random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*ssf_cmd) return cmd_ssf(config, out, format, jobs, o);
    if (*mu_cmd) return cmd_mu(config, lambda, method, o);
    if (*det_cmd) return cmd_det(config, lambda, o);
    if (*check_cmd) return cmd_check(suite, seed);
  } catch (const ssf::io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ssf::Error& e) {
    report_error(e);
    return kFailure;
  }
  return kConfigError;
}
