#include "percsim/percsim.h"

#include "percsim/harness.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

struct percsim_scenario {
  percsim::ScenarioConfig cfg;
};

struct percsim_result {
  percsim::RunResult res;
};

namespace {

thread_local std::string g_last_error;

percsim_status fail(percsim_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class F>
percsim_status guarded(F&& f) {
  try {
    return f();
  } catch (const percsim::ConfigError& e) {
    return fail(PERCSIM_CONFIG, e.what());
  } catch (const percsim::NumericalError& e) {
    return fail(PERCSIM_NUMERICAL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(PERCSIM_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PERCSIM_INTERNAL, e.what());
  }
}

percsim_status write_file(const char* path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return fail(PERCSIM_IO, std::string("cannot open for writing: ") + path);
  out << body;
  if (!out) return fail(PERCSIM_IO, std::string("write failed: ") + path);
  return PERCSIM_OK;
}

}  // namespace

extern "C" {

const char* percsim_version(void) { return "0.1.0"; }

const char* percsim_last_error(void) { return g_last_error.c_str(); }

percsim_status percsim_scenario_load(const char* path, percsim_scenario** out) {
  if (!path || !out) return fail(PERCSIM_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto sc = std::make_unique<percsim_scenario>();
    sc->cfg = percsim::load_scenario(path);
    *out = sc.release();
    return PERCSIM_OK;
  });
}

percsim_status percsim_scenario_parse(const char* json_text, percsim_scenario** out) {
  if (!json_text || !out) return fail(PERCSIM_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto sc = std::make_unique<percsim_scenario>();
    sc->cfg = percsim::parse_scenario_text(json_text);
    *out = sc.release();
    return PERCSIM_OK;
  });
}

void percsim_scenario_free(percsim_scenario* sc) { delete sc; }

percsim_status percsim_scenario_set_seed(percsim_scenario* sc, uint64_t seed) {
  if (!sc) return fail(PERCSIM_INVALID_ARGUMENT, "null scenario");
  sc->cfg.seed = seed;
  return PERCSIM_OK;
}

percsim_status percsim_scenario_set_param(percsim_scenario* sc, const char* axis, double value) {
  if (!sc || !axis) return fail(PERCSIM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    percsim::ScenarioConfig next = sc->cfg;
    percsim::apply_axis(next, axis, value);
    sc->cfg = std::move(next);
    return PERCSIM_OK;
  });
}

percsim_status percsim_scenario_validate(const percsim_scenario* sc) {
  if (!sc) return fail(PERCSIM_INVALID_ARGUMENT, "null scenario");
  return guarded([&] {
    sc->cfg.validate();
    return PERCSIM_OK;
  });
}

const char* percsim_scenario_name(const percsim_scenario* sc) { return sc ? sc->cfg.name.c_str() : ""; }

percsim_status percsim_run(const percsim_scenario* sc, percsim_result** out) {
  if (!sc || !out) return fail(PERCSIM_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<percsim_result>();
    r->res = percsim::run_scenario(sc->cfg);
    const bool aborted = r->res.aborted;
    std::string diag = r->res.diagnostic;
    *out = r.release();
    return aborted ? fail(PERCSIM_NUMERICAL, diag) : PERCSIM_OK;
  });
}

void percsim_result_free(percsim_result* r) { delete r; }

percsim_status percsim_result_summary(const percsim_result* r, percsim_summary* out) {
  if (!r || !out) return fail(PERCSIM_INVALID_ARGUMENT, "null argument");
  const percsim::RunSummary& s = r->res.summary;
  *out = percsim_summary{};
  out->steps = s.steps;
  out->has_rms = s.rms_formation.has_value();
  out->rms_formation = s.rms_formation.value_or(0.0);
  out->sup_cov_norm = s.sup_cov_norm;
  out->sum_cov_norm = s.sum_cov_norm;
  out->missed_fraction = s.missed_fraction;
  out->mean_latency = s.mean_latency;
  out->final_obs_ratio = s.final_obs_ratio;
  out->has_nominal_rate = s.nominal_selection_rate.has_value();
  out->nominal_selection_rate = s.nominal_selection_rate.value_or(0.0);
  out->max_formation_error = s.max_formation_error;
  out->aborted = r->res.aborted;
  return PERCSIM_OK;
}

size_t percsim_result_tick_count(const percsim_result* r) { return r ? r->res.records.size() : 0; }

percsim_status percsim_result_write_ticks_csv(const percsim_result* r, const char* path) {
  if (!r || !path) return fail(PERCSIM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) return fail(PERCSIM_IO, std::string("cannot open for writing: ") + path);
    percsim::write_ticks_csv(r->res.records, out);
    if (!out) return fail(PERCSIM_IO, std::string("write failed: ") + path);
    return PERCSIM_OK;
  });
}

percsim_status percsim_result_write_summary_json(const percsim_result* r, const char* path) {
  if (!r || !path) return fail(PERCSIM_INVALID_ARGUMENT, "null argument");
  return guarded([&] { return write_file(path, percsim::summary_to_json(r->res).dump(2) + "\n"); });
}

percsim_status percsim_result_summary_json(const percsim_result* r, char** out) {
  if (!r || !out) return fail(PERCSIM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup(percsim::summary_to_json(r->res).dump(2));
    return *out ? PERCSIM_OK : fail(PERCSIM_INTERNAL, "out of memory");
  });
}

percsim_status percsim_sweep(const percsim_scenario* sc, const char* axis, const double* values, size_t n_values,
                             int seeds, char** json_out, char** table_out) {
  if (!sc || !axis || (!values && n_values > 0)) return fail(PERCSIM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const std::vector<double> vals(values, values + n_values);
    const auto rows = percsim::sweep(sc->cfg, axis, vals, seeds);
    if (json_out) *json_out = dup(percsim::sweep_to_json(axis, rows).dump(2));
    if (table_out) *table_out = dup(percsim::sweep_table(axis, rows));
    return PERCSIM_OK;
  });
}

percsim_status percsim_report(const char* dir, char** out) {
  if (!dir || !out) return fail(PERCSIM_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup(percsim::report_directory(dir));
    return PERCSIM_OK;
  });
}

void percsim_string_free(char* s) { std::free(s); }

}  // extern "C"
