#pragma once

// Property suites over seeded random instances.  Each suite reports the
// number of cases, how many met their tolerance, and the worst defect seen
// per property.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace ssf::checks {

struct CheckReport {
  explicit CheckReport(std::string name = {}) : suite(std::move(name)) {}

  std::string suite;
  int cases_run = 0;
  int cases_passed = 0;
  std::map<std::string, double> max_defects;
  std::vector<std::string> failures;  // first few failing cases, for diagnosis
  double wall_time_s = 0.0;

  bool passed() const { return cases_run > 0 && cases_run == cases_passed; }
  void record(bool ok, const std::string& what);
  void defect(const std::string& name, double value);
  void merge(const CheckReport& other);
};

nlohmann::json report_to_json(const CheckReport& r);

// Individual properties.  Counts default to the sizes used by `check`.
CheckReport check_counting_oracle(std::uint64_t seed, int models = 100);
CheckReport check_spectral_equality(std::uint64_t seed, int models = 50, int heights = 5);
CheckReport check_lattice_flow_index(std::uint64_t seed);
CheckReport check_lattice_determinant(std::uint64_t seed);
CheckReport check_birman_krein(std::uint64_t seed, int points = 101);
CheckReport check_invariance(std::uint64_t seed, int dense_models = 10);
CheckReport check_sign_definite(std::uint64_t seed, int points = 101);
CheckReport check_scalar_closed_forms();
CheckReport check_e_lemmas(std::uint64_t seed, int instances = 50);
CheckReport check_trace_formula(std::uint64_t seed, int pairs = 50);
CheckReport check_gap_relation(std::uint64_t seed, int instances = 50, int flow_lambdas = 10);
CheckReport check_lidski(std::uint64_t seed, int instances = 200);
CheckReport check_index_rules(std::uint64_t seed, int instances = 200);
CheckReport check_flow_properties(std::uint64_t seed, int paths = 20);

const std::vector<std::string>& suite_names();
/// Throws std::invalid_argument for an unknown suite name.
CheckReport run_suite(const std::string& name, std::uint64_t seed);

}  // namespace ssf::checks
