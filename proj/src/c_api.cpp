#include "curveflow/curveflow.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "curveflow/cli_io.hpp"
#include "curveflow/error.hpp"

struct cf_spectrum {
  curveflow::SupportSpectrum spec;
};

struct cf_trajectory {
  curveflow::Trajectory traj;
  std::vector<cf_spectrum> spectra;
  std::string outcome;
  std::string verdict;
};

struct cf_config {
  curveflow::RunConfig config;
};

namespace {

thread_local std::string last_error;

cf_status to_status(curveflow::ErrorCode code) {
  using curveflow::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return CF_INVALID_ARGUMENT;
    case ErrorCode::NotConvex: return CF_NOT_CONVEX;
    case ErrorCode::Domain: return CF_DOMAIN;
    case ErrorCode::Parse: return CF_PARSE;
    case ErrorCode::Io: return CF_IO;
  }
  return CF_INTERNAL;
}

template <class F>
cf_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return CF_OK;
  } catch (const curveflow::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return CF_INTERNAL;
}

cf_status null_argument(const char* name) {
  last_error = std::string("null argument '") + name + "'";
  return CF_INVALID_ARGUMENT;
}

char* duplicate(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

curveflow::IntegratorControls from_c(const cf_controls& c) {
  curveflow::IntegratorControls out;
  out.rel_tol = c.rel_tol;
  out.abs_tol = c.abs_tol;
  out.t_max = c.t_max;
  out.length_blowup = c.length_blowup;
  out.length_vanish = c.length_vanish;
  out.area_vanish = c.area_vanish;
  out.singularity_eps = c.singularity_eps;
  out.sample_interval = c.sample_interval;
  return out;
}

std::optional<std::filesystem::path> optional_dir(const char* dir) {
  if (!dir || !*dir) return std::nullopt;
  return std::filesystem::path(dir);
}

}  // namespace

extern "C" {

const char* cf_version(void) { return "0.1.0"; }

const char* cf_last_error(void) { return last_error.c_str(); }

const char* cf_status_name(cf_status status) {
  switch (status) {
    case CF_OK: return "ok";
    case CF_INVALID_ARGUMENT: return "invalid-argument";
    case CF_NOT_CONVEX: return "not-convex";
    case CF_DOMAIN: return "domain";
    case CF_PARSE: return "parse";
    case CF_IO: return "io";
    case CF_INTERNAL: return "internal";
  }
  return "unknown";
}

void cf_free_string(char* s) { std::free(s); }

cf_status cf_spectrum_create(double mean, const double* cos_coeffs, const double* sin_coeffs,
                             size_t count, cf_spectrum** out) {
  if (!out) return null_argument("out");
  if (count > 0 && (!cos_coeffs || !sin_coeffs)) return null_argument("coefficients");
  return guarded([&] {
    *out = new cf_spectrum{curveflow::SupportSpectrum(
        mean, std::vector<double>(cos_coeffs, cos_coeffs + count),
        std::vector<double>(sin_coeffs, sin_coeffs + count))};
  });
}

cf_status cf_spectrum_from_samples(const double* samples, size_t count, size_t truncation,
                                   cf_spectrum** out) {
  if (!out) return null_argument("out");
  if (!samples) return null_argument("samples");
  return guarded([&] {
    *out = new cf_spectrum{curveflow::project_from_samples({samples, count}, truncation)};
  });
}

cf_status cf_spectrum_from_polygon(const double* xy, size_t vertex_count, size_t truncation,
                                   cf_spectrum** out) {
  if (!out) return null_argument("out");
  if (!xy) return null_argument("xy");
  return guarded([&] {
    std::vector<curveflow::Point2> vertices(vertex_count);
    for (size_t i = 0; i < vertex_count; ++i) vertices[i] = {xy[2 * i], xy[2 * i + 1]};
    *out = new cf_spectrum{curveflow::spectrum_from_polygon(vertices, truncation)};
  });
}

cf_status cf_spectrum_from_json(const char* json, cf_spectrum** out) {
  if (!out) return null_argument("out");
  if (!json) return null_argument("json");
  return guarded([&] { *out = new cf_spectrum{curveflow::spectrum_from_json(json)}; });
}

cf_status cf_spectrum_to_json(const cf_spectrum* spec, char** out) {
  if (!spec) return null_argument("spec");
  if (!out) return null_argument("out");
  return guarded([&] { *out = duplicate(curveflow::spectrum_to_json(spec->spec)); });
}

void cf_spectrum_destroy(cf_spectrum* spec) { delete spec; }

size_t cf_spectrum_truncation(const cf_spectrum* spec) { return spec ? spec->spec.truncation() : 0; }

double cf_spectrum_mean(const cf_spectrum* spec) { return spec ? spec->spec.mean() : 0.0; }

cf_status cf_spectrum_mode(const cf_spectrum* spec, size_t n, double* a, double* b) {
  if (!spec) return null_argument("spec");
  if (n == 0) {
    last_error = "mode index starts at 1";
    return CF_INVALID_ARGUMENT;
  }
  if (a) *a = spec->spec.cos_coeff(n);
  if (b) *b = spec->spec.sin_coeff(n);
  last_error.clear();
  return CF_OK;
}

cf_status cf_spectrum_summarize(const cf_spectrum* spec, cf_summary* out) {
  if (!spec) return null_argument("spec");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto g = curveflow::geometric_summary(spec->spec);
    *out = cf_summary{g.length, g.area,  g.ipd, g.ipr, g.k_min, g.k_max, g.inv_curv_integral,
                      g.sq_curv_integral, g.curvature_valid ? 1 : 0};
  });
}

cf_status cf_curve_position(const cf_spectrum* spec, size_t count, double* xy_out) {
  if (!spec) return null_argument("spec");
  if (!xy_out) return null_argument("xy_out");
  return guarded([&] {
    const auto samples = curveflow::curve_position(spec->spec, count);
    for (size_t i = 0; i < samples.points.size(); ++i) {
      xy_out[2 * i] = samples.points[i][0];
      xy_out[2 * i + 1] = samples.points[i][1];
    }
  });
}

void cf_controls_default(cf_controls* out) {
  if (!out) return;
  const curveflow::IntegratorControls c;
  *out = cf_controls{c.rel_tol,     c.abs_tol,     c.t_max,           c.length_blowup,
                     c.length_vanish, c.area_vanish, c.singularity_eps, c.sample_interval};
}

cf_status cf_integrate(const cf_spectrum* initial, const char* flow, const cf_controls* controls,
                       cf_trajectory** out) {
  if (!initial) return null_argument("initial");
  if (!flow) return null_argument("flow");
  if (!out) return null_argument("out");
  return guarded([&] {
    const auto term = curveflow::parse_nonlocal_term(flow);
    const auto c = controls ? from_c(*controls) : curveflow::IntegratorControls{};
    auto result = std::make_unique<cf_trajectory>();
    result->traj = curveflow::integrate(initial->spec, term, c);
    for (const auto& s : result->traj.states) result->spectra.push_back(cf_spectrum{s.spectrum});
    result->outcome = curveflow::outcome_name(result->traj.outcome);
    result->verdict = curveflow::verdict(result->traj.outcome);
    *out = result.release();
  });
}

void cf_trajectory_destroy(cf_trajectory* traj) { delete traj; }

size_t cf_trajectory_size(const cf_trajectory* traj) { return traj ? traj->traj.states.size() : 0; }

cf_status cf_trajectory_state(const cf_trajectory* traj, size_t index, cf_state* out) {
  if (!traj) return null_argument("traj");
  if (!out) return null_argument("out");
  if (index >= traj->traj.states.size()) {
    last_error = "state index out of range";
    return CF_INVALID_ARGUMENT;
  }
  const auto& s = traj->traj.states[index];
  *out = cf_state{s.t, s.length, s.area, curveflow::isoperimetric_deficit(s.spectrum)};
  last_error.clear();
  return CF_OK;
}

const cf_spectrum* cf_trajectory_spectrum(const cf_trajectory* traj, size_t index) {
  if (!traj || index >= traj->spectra.size()) return nullptr;
  return &traj->spectra[index];
}

cf_status cf_trajectory_event(const cf_trajectory* traj, cf_event* out) {
  if (!traj) return null_argument("traj");
  if (!out) return null_argument("out");
  const auto& ev = traj->traj.event;
  *out = cf_event{static_cast<cf_event_kind>(static_cast<int>(ev.kind)), ev.t, ev.theta};
  last_error.clear();
  return CF_OK;
}

const char* cf_trajectory_outcome(const cf_trajectory* traj) {
  return traj ? traj->outcome.c_str() : "";
}

const char* cf_trajectory_verdict(const cf_trajectory* traj) {
  return traj ? traj->verdict.c_str() : "";
}

cf_status cf_config_parse(const char* text, cf_config** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  return guarded([&] { *out = new cf_config{curveflow::parse_config(text)}; });
}

cf_status cf_config_load(const char* path, cf_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] { *out = new cf_config{curveflow::load_config(path)}; });
}

cf_status cf_config_emit(const cf_config* config, char** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] { *out = duplicate(curveflow::emit_config(config->config)); });
}

void cf_config_destroy(cf_config* config) { delete config; }

cf_status cf_run(const cf_config* config, const char* out_dir, char** verdict_out) {
  if (!config) return null_argument("config");
  return guarded([&] {
    const auto result = curveflow::run(config->config, optional_dir(out_dir));
    if (verdict_out) *verdict_out = duplicate(result.verdict);
  });
}

cf_status cf_sweep(const cf_config* config, const char* axis, const char* out_dir,
                   char** summary_csv_out) {
  if (!config) return null_argument("config");
  if (!axis) return null_argument("axis");
  return guarded([&] {
    const auto rows =
        curveflow::sweep(config->config, curveflow::parse_axis(axis), optional_dir(out_dir));
    if (summary_csv_out) {
      std::ostringstream csv;
      curveflow::write_sweep_csv(csv, rows);
      *summary_csv_out = duplicate(csv.str());
    }
  });
}

cf_status cf_check(const cf_config* config, char** report_csv_out, int* all_satisfied) {
  if (!config) return null_argument("config");
  return guarded([&] {
    const auto reports = curveflow::check(config->config);
    bool ok = true;
    for (const auto& r : reports) ok = ok && r.satisfied;
    if (all_satisfied) *all_satisfied = ok ? 1 : 0;
    if (report_csv_out) {
      std::ostringstream csv;
      curveflow::write_reports_csv(csv, reports);
      *report_csv_out = duplicate(csv.str());
    }
  });
}

}  // extern "C"
