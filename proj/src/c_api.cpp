#include "rmtfid/rmtfid.h"

#include "rmtfid/ensembles.hpp"
#include "rmtfid/error.hpp"
#include "rmtfid/experiment.hpp"
#include "rmtfid/io.hpp"
#include "rmtfid/theory.hpp"

#include <cstring>
#include <new>
#include <string>

struct rmtfid_config {
  rmtfid::ExperimentConfig config;
};

struct rmtfid_run {
  rmtfid::RunRecord record;
};

struct rmtfid_report {
  rmtfid::ComparisonReport report;
};

namespace {

thread_local std::string g_last_error;

rmtfid_status status_of(rmtfid::ErrorKind kind) {
  switch (kind) {
    case rmtfid::ErrorKind::config: return RMTFID_ERR_CONFIG;
    case rmtfid::ErrorKind::domain: return RMTFID_ERR_DOMAIN;
    case rmtfid::ErrorKind::numerical: return RMTFID_ERR_NUMERICAL;
    case rmtfid::ErrorKind::io: return RMTFID_ERR_IO;
  }
  return RMTFID_ERR_INTERNAL;
}

template <typename F>
rmtfid_status guarded(F&& body) {
  try {
    body();
    return RMTFID_OK;
  } catch (const rmtfid::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RMTFID_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RMTFID_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RMTFID_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw rmtfid::ConfigError(std::string(what) + " must not be null");
}

char* duplicate(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rmtfid::OutputFormat to_format(rmtfid_format format) {
  switch (format) {
    case RMTFID_FORMAT_CSV: return rmtfid::OutputFormat::csv;
    case RMTFID_FORMAT_JSON: return rmtfid::OutputFormat::json;
  }
  throw rmtfid::ConfigError("unknown output format");
}

rmtfid::Thresholds to_thresholds(const rmtfid_thresholds& t) {
  rmtfid::Thresholds out;
  out.z_max = t.z_max;
  out.f_fraction = t.f_fraction;
  out.z_point = t.z_point;
  out.max_abs_deviation = t.max_abs_deviation;
  out.fk_fraction = t.fk_fraction;
  out.require_k_vs_theory = t.require_k_vs_theory != 0;
  out.k_fraction = t.k_fraction;
  return out;
}

}  // namespace

extern "C" {

const char* rmtfid_version(void) { return "1.0.0"; }

const char* rmtfid_last_error(void) { return g_last_error.c_str(); }

void rmtfid_string_free(char* s) { delete[] s; }

rmtfid_status rmtfid_format_real(double value, char* buf, size_t cap) {
  return guarded([&] {
    require(buf, "buf");
    const std::string s = rmtfid::format_real(value);
    if (s.size() + 1 > cap) throw rmtfid::ConfigError("buffer too small");
    std::memcpy(buf, s.c_str(), s.size() + 1);
  });
}

rmtfid_status rmtfid_config_new(rmtfid_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new rmtfid_config{};
  });
}

rmtfid_status rmtfid_config_load(const char* path, rmtfid_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new rmtfid_config{rmtfid::load_config(path)};
  });
}

rmtfid_status rmtfid_config_parse(const char* json_text, rmtfid_config** out) {
  return guarded([&] {
    require(json_text, "json_text");
    require(out, "out");
    *out = new rmtfid_config{rmtfid::config_from_json(json_text)};
  });
}

void rmtfid_config_free(rmtfid_config* config) { delete config; }

rmtfid_status rmtfid_config_set_int(rmtfid_config* config, const char* key, int64_t value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    auto& c = config->config;
    const std::string k = key;
    if (k == "n_levels") {
      c.model = rmtfid::SpectrumModel(static_cast<int>(value), c.model.mode());
    } else if (k == "beta") {
      c.spec.beta = rmtfid::beta_from_int(static_cast<int>(value));
    } else if (k == "n_realizations") {
      if (value < 2 || value > INT32_MAX) throw rmtfid::ConfigError("n_realizations out of range");
      c.n_realizations = static_cast<int>(value);
    } else if (k == "workers") {
      if (value < 1 || value > 4096) throw rmtfid::ConfigError("workers out of range");
      c.workers = static_cast<int>(value);
    } else if (k == "master_seed") {
      c.master_seed = static_cast<std::uint64_t>(value);
    } else {
      throw rmtfid::ConfigError("unknown integer config key '" + k + "'");
    }
  });
}

rmtfid_status rmtfid_config_set_seed(rmtfid_config* config, uint64_t seed) {
  return guarded([&] {
    require(config, "config");
    config->config.master_seed = seed;
  });
}

rmtfid_status rmtfid_config_set_real(rmtfid_config* config, const char* key, double value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    auto& c = config->config;
    const std::string k = key;
    if (k == "lambda_par") c.spec.lambda_par = value;
    else if (k == "lambda_perp") c.spec.lambda_perp = value;
    else if (k == "tau_min") c.tau_min = value;
    else if (k == "tau_max") c.tau_max = value;
    else if (k == "tau_step") c.tau_step = value;
    else if (k == "window_fraction") c.window_fraction = value;
    else throw rmtfid::ConfigError("unknown real config key '" + k + "'");
  });
}

rmtfid_status rmtfid_config_set_string(rmtfid_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    auto& c = config->config;
    if (std::string(key) != "mode")
      throw rmtfid::ConfigError("unknown string config key '" + std::string(key) + "'");
    c.model = rmtfid::SpectrumModel(c.model.n_levels(), rmtfid::spectrum_mode_from_string(value));
  });
}

rmtfid_status rmtfid_config_get_int(const rmtfid_config* config, const char* key, int64_t* out) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(out, "out");
    const auto& c = config->config;
    const std::string k = key;
    if (k == "n_levels") *out = c.model.n_levels();
    else if (k == "beta") *out = rmtfid::to_int(c.spec.beta);
    else if (k == "n_realizations") *out = c.n_realizations;
    else if (k == "workers") *out = c.workers;
    else throw rmtfid::ConfigError("unknown integer config key '" + k + "'");
  });
}

rmtfid_status rmtfid_config_validate(const rmtfid_config* config) {
  return guarded([&] {
    require(config, "config");
    config->config.validate();
  });
}

rmtfid_status rmtfid_config_to_json(const rmtfid_config* config, char** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = duplicate(rmtfid::config_to_json(config->config));
  });
}

rmtfid_status rmtfid_run_simulate(const rmtfid_config* config, rmtfid_progress_fn progress,
                                  void* user, rmtfid_run** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    rmtfid::ProgressFn fn;
    if (progress) fn = [progress, user](int done, int total) { progress(done, total, user); };
    auto stats = rmtfid::run(config->config, fn);
    *out = new rmtfid_run{rmtfid::make_record(config->config, std::move(stats))};
  });
}

rmtfid_status rmtfid_run_load(const char* path, rmtfid_format format, rmtfid_run** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new rmtfid_run{rmtfid::import_record(path, to_format(format))};
  });
}

rmtfid_status rmtfid_run_merge(const rmtfid_run* a, const rmtfid_run* b, rmtfid_run** out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    if (a->record.theory.values != b->record.theory.values)
      throw rmtfid::ConfigError("runs carry different theory curves");
    auto merged = rmtfid::EnsembleStatistics::merge(a->record.stats, b->record.stats);
    rmtfid::RunRecord record{std::move(merged), a->record.theory, a->record.config};
    if (record.config) record.config->n_realizations = static_cast<int>(record.stats.count());
    *out = new rmtfid_run{std::move(record)};
  });
}

void rmtfid_run_free(rmtfid_run* run) { delete run; }

rmtfid_status rmtfid_run_save(const rmtfid_run* run, const char* path, rmtfid_format format) {
  return guarded([&] {
    require(run, "run");
    require(path, "path");
    rmtfid::export_record(run->record, path, to_format(format));
  });
}

rmtfid_status rmtfid_run_serialize(const rmtfid_run* run, rmtfid_format format, char** out) {
  return guarded([&] {
    require(run, "run");
    require(out, "out");
    *out = duplicate(to_format(format) == rmtfid::OutputFormat::csv ? rmtfid::to_csv(run->record)
                                                                     : rmtfid::to_json(run->record));
  });
}

size_t rmtfid_run_size(const rmtfid_run* run) { return run ? run->record.stats.size() : 0; }

int64_t rmtfid_run_count(const rmtfid_run* run) { return run ? run->record.stats.count() : 0; }

rmtfid_status rmtfid_run_point(const rmtfid_run* run, size_t index, rmtfid_point* out) {
  return guarded([&] {
    require(run, "run");
    require(out, "out");
    const auto& s = run->record.stats;
    if (index >= s.size()) throw rmtfid::ConfigError("point index out of range");
    const auto& p = s.point(index);
    *out = {s.taus()[index],
            p.f_re.mean(),
            p.f_im.mean(),
            p.f_re.standard_error(),
            p.f_im.standard_error(),
            p.k_re.mean(),
            p.k_im.mean(),
            p.k_re.standard_error(),
            p.k_im.standard_error(),
            run->record.theory.values[index]};
  });
}

void rmtfid_thresholds_default(rmtfid_thresholds* out) {
  if (!out) return;
  const rmtfid::Thresholds t;
  *out = {t.z_max, t.f_fraction, t.z_point, t.max_abs_deviation, t.fk_fraction,
          t.require_k_vs_theory ? 1 : 0, t.k_fraction};
}

rmtfid_status rmtfid_compare(const rmtfid_run* run, const rmtfid_thresholds* thresholds,
                             rmtfid_report** out) {
  return guarded([&] {
    require(run, "run");
    require(out, "out");
    const rmtfid::Thresholds t = thresholds ? to_thresholds(*thresholds) : rmtfid::Thresholds{};
    *out = new rmtfid_report{rmtfid::compare(run->record.stats, run->record.theory, true, t)};
  });
}

int rmtfid_report_passed(const rmtfid_report* report) { return report && report->report.passed ? 1 : 0; }

rmtfid_status rmtfid_report_to_json(const rmtfid_report* report, char** out) {
  return guarded([&] {
    require(report, "report");
    require(out, "out");
    *out = duplicate(report->report.to_json());
  });
}

void rmtfid_report_free(rmtfid_report* report) { delete report; }

rmtfid_status rmtfid_theory_fidelity(double lambda_par, double lambda_perp, int beta, double tau,
                                     double* out) {
  return guarded([&] {
    require(out, "out");
    *out = rmtfid::fidelity_closed_form(lambda_par, lambda_perp, rmtfid::beta_from_int(beta), tau);
  });
}

rmtfid_status rmtfid_theory_log_perturbative(double lambda, int beta, double tau, double c_corr,
                                             double* out) {
  return guarded([&] {
    require(out, "out");
    *out = rmtfid::log_fidelity_perturbative(lambda, rmtfid::beta_from_int(beta), tau, c_corr);
  });
}

rmtfid_status rmtfid_theory_identity_residual(double lambda_par, double lambda_perp, int beta,
                                              double tau, double step, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = rmtfid::differential_identity_residual(lambda_par, lambda_perp,
                                                  rmtfid::beta_from_int(beta), tau, step);
  });
}

rmtfid_status rmtfid_spreading_width(double lambda, double mean_spacing, double* out) {
  return guarded([&] {
    require(out, "out");
    if (!(lambda >= 0.0) || !(mean_spacing > 0.0))
      throw rmtfid::DomainError("spreading width needs lambda >= 0 and D > 0");
    *out = rmtfid::spreading_width(lambda, mean_spacing);
  });
}

rmtfid_status rmtfid_moment_check(int beta, int n, int64_t n_samples, uint64_t seed, char** json_out,
                                  int* passed) {
  return guarded([&] {
    require(json_out, "json_out");
    const auto report = rmtfid::moment_check(rmtfid::beta_from_int(beta), n, n_samples, seed);
    *json_out = duplicate(report.to_json() + "\n");
    if (passed) *passed = report.passed() ? 1 : 0;
  });
}

}  // extern "C"
