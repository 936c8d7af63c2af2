#include "ssf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "ssf/error.hpp"

namespace ssf::io {

using linalg::cd;
using linalg::Index;
using linalg::Matrix;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

const json& require(const json& j, const char* key, const char* where) {
  if (!j.is_object() || !j.contains(key)) fail(std::string(where) + ": missing \"" + key + "\"");
  return j.at(key);
}

double number(const json& j, const char* what) {
  if (!j.is_number()) fail(std::string(what) + " must be a number");
  return j.get<double>();
}

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json optional_number(const std::optional<double>& x) {
  if (!x || !std::isfinite(*x)) return nullptr;
  return *x;
}

}  // namespace

cd complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_object()) fail("complex entry must be {\"re\", \"im\"} or a number");
  const double re = j.contains("re") ? number(j.at("re"), "re") : 0.0;
  const double im = j.contains("im") ? number(j.at("im"), "im") : 0.0;
  return {re, im};
}

json complex_to_json(cd z) { return {{"re", z.real()}, {"im", z.imag()}}; }

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) fail("matrix must be a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.front().size());
  if (cols == 0) fail("matrix rows must be non-empty");
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j.at(static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) fail("matrix rows differ in length");
    for (Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row.at(static_cast<std::size_t>(c)));
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------

models::ModelPtr model_from_json(const json& cfg, std::uint64_t seed) {
  try {
    const json& model = require(cfg, "model", "config");
    const json& pert = cfg.contains("perturbation") ? cfg.at("perturbation")
                                                     : require(model, "perturbation", "model");
    const models::Coupling coupling{linalg::HermitianMatrix(matrix_from_json(require(pert, "j", "perturbation")))};
    const std::string type = require(model, "type", "model").get<std::string>();

    models::ModelPtr out;
    if (type == "dense") {
      linalg::HermitianMatrix h0(matrix_from_json(require(model, "h0", "model")));
      out = std::make_shared<models::DenseModel>(std::move(h0), matrix_from_json(require(pert, "g", "perturbation")),
                                                 coupling, seed);
    } else if (type == "halfline_laplacian") {
      const json& sites = require(pert, "sites", "perturbation");
      if (!sites.is_array()) fail("perturbation.sites must be an array");
      std::vector<long> s;
      for (const json& v : sites) {
        if (!v.is_number_integer()) fail("lattice sites must be integers");
        s.push_back(v.get<long>());
      }
      out = std::make_shared<models::HalfLineLaplacianModel>(
          std::move(s), matrix_from_json(require(pert, "weights", "perturbation")), coupling);
    } else {
      fail("unknown model type \"" + type + "\"");
    }

    if (cfg.contains("transform") && !cfg.at("transform").is_null()) {
      const json& t = cfg.at("transform");
      const std::string kind = require(t, "type", "transform").get<std::string>();
      models::MoebiusMap f;
      if (kind == "affine") {
        f = models::MoebiusMap::affine(number(require(t, "a", "transform"), "a"),
                                       number(require(t, "b", "transform"), "b"));
      } else if (kind == "inverse_shift") {
        f = models::MoebiusMap::inverse_shift(number(require(t, "lambda0", "transform"), "lambda0"));
      } else {
        fail("unknown transform type \"" + kind + "\"");
      }
      out = models::moebius_pushforward(out, f, seed).model;
    }
    return out;
  } catch (const Error& e) {
    throw ConfigError(std::string("model construction failed: ") + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model: ") + e.what());
  }
}

std::vector<double> lambda_grid_from_json(const json& j) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const json& v : j) out.push_back(number(v, "lambda_grid entry"));
    if (out.empty()) fail("lambda_grid list is empty");
    return out;
  }
  if (!j.is_object()) fail("lambda_grid must be a list or {start, stop, count}");
  const double start = number(require(j, "start", "lambda_grid"), "start");
  const double stop = number(require(j, "stop", "lambda_grid"), "stop");
  const json& cj = require(j, "count", "lambda_grid");
  if (!cj.is_number_integer() || cj.get<long>() < 1) fail("lambda_grid.count must be an integer >= 1");
  const long count = cj.get<long>();
  if (count == 1) return {start};
  if (!(start < stop)) fail("lambda_grid needs start < stop");
  for (long k = 0; k < count; ++k) out.push_back(start + (stop - start) * static_cast<double>(k) / (count - 1));
  return out;
}

void apply_flow_options(const json& j, engine::EngineConfig& cfg) {
  if (!j.is_object()) fail("flow must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "eps_gap") {
      cfg.flow.eps_gap = number(v, "eps_gap");
      if (!(cfg.flow.eps_gap > 0.0)) fail("flow.eps_gap must be positive");
    } else if (key == "max_depth") {
      cfg.flow.max_depth = static_cast<int>(number(v, "max_depth"));
    } else if (key == "initial_grid") {
      cfg.flow.initial_grid = static_cast<int>(number(v, "initial_grid"));
      if (cfg.flow.initial_grid < 1) fail("flow.initial_grid must be >= 1");
    } else if (key == "id_tol") {
      cfg.flow.id_tol = number(v, "id_tol");
    } else if (key == "y_max") {
      cfg.y_max = number(v, "y_max");
    } else if (key == "y_min") {
      cfg.y_min = number(v, "y_min");
    } else if (key == "grid_ratio") {
      cfg.grid_ratio = number(v, "grid_ratio");
      if (!(cfg.grid_ratio > 0.0 && cfg.grid_ratio < 1.0)) fail("flow.grid_ratio must lie in (0, 1)");
    } else if (key == "zero_tol") {
      cfg.zero_tol = number(v, "zero_tol");
    } else if (key == "inv_tol") {
      cfg.inv_tol = number(v, "inv_tol");
    } else {
      fail("unknown flow option \"" + key + "\"");
    }
  }
}

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) fail("config must be a JSON object");
  RunConfig rc;
  try {
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) fail("seed must be an integer");
      rc.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("theta_samples")) {
      rc.engine.theta_samples = j.at("theta_samples").get<int>();
      if (rc.engine.theta_samples < 1) fail("theta_samples must be >= 1");
    }
    if (j.contains("flow")) apply_flow_options(j.at("flow"), rc.engine);
    if (j.contains("lambda_grid")) rc.lambdas = lambda_grid_from_json(j.at("lambda_grid"));
    if (j.contains("output")) {
      const json& o = j.at("output");
      if (o.contains("path")) rc.output.path = o.at("path").get<std::string>();
      if (o.contains("format")) rc.output.format = o.at("format").get<std::string>();
      if (rc.output.format != "jsonl" && rc.output.format != "csv") fail("output.format must be jsonl or csv");
    }
  } catch (const json::exception& e) {
    fail(std::string("malformed config: ") + e.what());
  }
  rc.model = model_from_json(j, rc.seed);
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(std::string("cannot parse ") + path + ": " + e.what());
  }
  return parse_run_config(j);
}

// ---------------------------------------------------------------------------

json step_to_json(const circle::CircleStepFunction& f) {
  json jumps = json::array();
  for (const circle::Jump& jp : f.jumps()) jumps.push_back({{"theta", jp.theta}, {"m", jp.m}});
  return {{"tail", f.tail()}, {"jumps", jumps}};
}

circle::CircleStepFunction step_from_json(const json& j) {
  std::vector<circle::Jump> jumps;
  for (const json& jp : j.at("jumps")) jumps.push_back({jp.at("theta").get<double>(), jp.at("m").get<int>()});
  return circle::CircleStepFunction(std::move(jumps), j.at("tail").get<int>());
}

json mu_to_json(const engine::MuFunction& mu) {
  json out = step_to_json(mu.step);
  out["lambda"] = mu.lambda;
  out["method"] = std::string(engine::to_string(mu.method));
  out["jump_phases_source"] = mu.jump_phases_source;
  return out;
}

json record_to_json(const SsfRecord& rec) {
  json out;
  out["lambda"] = rec.lambda;
  out["xi_det"] = optional_number(rec.xi_det);
  out["xi_mu"] = optional_number(rec.xi_mu);
  out["xi_index"] = optional_number(rec.xi_index);
  out["xi_oracle"] = rec.xi_oracle ? json(*rec.xi_oracle) : json(nullptr);
  out["bk_defect"] = optional_number(rec.bk_defect);
  out["flags"] = rec.flags;
  return out;
}

json det_trace_to_json(const engine::DeterminantTrace& trace) {
  json rows = json::array();
  for (const engine::DetRow& r : trace.rows) {
    rows.push_back({{"y", r.y}, {"re", r.D.real()}, {"im", r.D.imag()}, {"arg", r.arg}});
  }
  return {{"lambda", trace.lambda}, {"y_max", trace.y_max}, {"xi_det", trace.xi}, {"rows", rows}};
}

std::string record_to_csv(const SsfRecord& rec) {
  const auto opt = [](const std::optional<double>& x) { return x ? fmt_double(*x) : std::string(); };
  std::ostringstream os;
  os << fmt_double(rec.lambda) << ',' << opt(rec.xi_det) << ',' << opt(rec.xi_mu) << ','
     << opt(rec.xi_index) << ',' << (rec.xi_oracle ? std::to_string(*rec.xi_oracle) : std::string())
     << ',' << opt(rec.bk_defect);
  return os.str();
}

void write_records(std::ostream& os, const std::vector<SsfRecord>& recs, const std::string& format) {
  if (format == "csv") {
    os << kCsvHeader << '\n';
    for (const SsfRecord& r : recs) os << record_to_csv(r) << '\n';
  } else if (format == "jsonl") {
    for (const SsfRecord& r : recs) os << record_to_json(r).dump() << '\n';
  } else {
    throw ConfigError("unknown output format \"" + format + "\"");
  }
}

}  // namespace ssf::io
