#include "ssf/sweep.hpp"

#include <algorithm>
#include <exception>

#include <omp.h>

#include "ssf/error.hpp"

namespace ssf {

namespace {

void add_flag(SsfRecord& rec, ErrorKind kind) {
  const std::string name(to_string(kind));
  if (std::find(rec.flags.begin(), rec.flags.end(), name) == rec.flags.end()) rec.flags.push_back(name);
}

template <typename F>
auto guarded(SsfRecord& rec, F&& f) -> std::optional<decltype(f())> {
  try {
    return f();
  } catch (const Error& e) {
    add_flag(rec, e.kind());
    return std::nullopt;
  }
}

}  // namespace

SsfRecord compute_record(const models::ResolventModel& model, double lambda,
                         const engine::EngineConfig& cfg) {
  SsfRecord rec;
  rec.lambda = lambda;
  rec.xi_det = guarded(rec, [&] { return engine::ssf_via_determinant(model, lambda, cfg); });
  rec.xi_mu = guarded(rec, [&] { return engine::ssf_from_mu(engine::mu_via_flow(model, lambda, cfg)); });
  rec.xi_index = guarded(rec, [&] { return engine::ssf_index_integral(model, lambda, cfg); });
  rec.bk_defect = guarded(rec, [&] { return engine::birman_krein_defect(model, lambda, cfg); });
  if (const models::DenseModel* dense = model.as_dense()) {
    // An energy already flagged is an eigenvalue; the oracle adds nothing there.
    if (rec.flags.empty()) {
      rec.xi_oracle = guarded(rec, [&] { return engine::counting_ssf_oracle(dense->H0(), dense->H(), lambda); });
    }
  }
  return rec;
}

std::vector<SsfRecord> sweep_serial(const models::ResolventModel& model,
                                    const std::vector<double>& lambdas,
                                    const engine::EngineConfig& cfg) {
  std::vector<SsfRecord> out;
  out.reserve(lambdas.size());
  for (double l : lambdas) out.push_back(compute_record(model, l, cfg));
  return out;
}

std::vector<SsfRecord> sweep_parallel(const models::ResolventModel& model,
                                      const std::vector<double>& lambdas,
                                      const engine::EngineConfig& cfg, int jobs) {
  const long n = static_cast<long>(lambdas.size());
  std::vector<SsfRecord> out(lambdas.size());
  std::exception_ptr failure;
  const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = compute_record(model, lambdas[static_cast<std::size_t>(i)], cfg);
    } catch (...) {
#pragma omp critical(ssf_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace ssf
