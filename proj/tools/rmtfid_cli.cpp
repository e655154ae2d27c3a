// Command-line front end over the rmtfid C API.
//
// Exit codes: 0 success, 1 failed verdict, 2 usage or configuration error,
// 3 runtime error.

#include "rmtfid/rmtfid.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdict = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

constexpr const char* kWorkersEnv = "RMTFID_WORKERS";

// Status -> exit code, with the library's message on stderr.
class Failure {
 public:
  explicit Failure(rmtfid_status status) : status_(status), message_(rmtfid_last_error()) {}
  Failure(int code, std::string message) : status_(RMTFID_OK), code_(code), message_(std::move(message)) {}

  int exit_code() const {
    if (status_ == RMTFID_OK) return code_;
    return (status_ == RMTFID_ERR_CONFIG || status_ == RMTFID_ERR_DOMAIN) ? kExitUsage : kExitRuntime;
  }
  const std::string& message() const { return message_; }

 private:
  rmtfid_status status_;
  int code_ = kExitRuntime;
  std::string message_;
};

void check(rmtfid_status status) {
  if (status != RMTFID_OK) throw Failure(status);
}

struct ConfigDeleter {
  void operator()(rmtfid_config* c) const { rmtfid_config_free(c); }
};
struct RunDeleter {
  void operator()(rmtfid_run* r) const { rmtfid_run_free(r); }
};
struct ReportDeleter {
  void operator()(rmtfid_report* r) const { rmtfid_report_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { rmtfid_string_free(s); }
};
using ConfigPtr = std::unique_ptr<rmtfid_config, ConfigDeleter>;
using RunPtr = std::unique_ptr<rmtfid_run, RunDeleter>;
using ReportPtr = std::unique_ptr<rmtfid_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

std::string real(double value) {
  char buf[64];
  check(rmtfid_format_real(value, buf, sizeof buf));
  return buf;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw Failure(kExitRuntime, out_path + ": cannot open for writing");
  out << text;
  if (!out.flush()) throw Failure(kExitRuntime, out_path + ": write failed");
}

rmtfid_format format_for(const std::string& format, const std::string& path) {
  if (format == "csv") return RMTFID_FORMAT_CSV;
  if (format == "json") return RMTFID_FORMAT_JSON;
  if (!format.empty()) throw Failure(kExitUsage, "unknown format '" + format + "'");
  const bool is_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
  return is_json ? RMTFID_FORMAT_JSON : RMTFID_FORMAT_CSV;
}

std::optional<int> env_workers() {
  const char* value = std::getenv(kWorkersEnv);
  if (value == nullptr || *value == '\0') return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(value, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096)
    throw Failure(kExitUsage, std::string(kWorkersEnv) + " must be a positive integer");
  return static_cast<int>(n);
}

// Experiment flags shared by simulate, compare and reproduce-figure.
struct SimFlags {
  std::string config_path;
  std::optional<int> beta;
  std::optional<double> lambda, lambda_par, lambda_perp;
  std::optional<int> n_levels, realizations, workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<double> tau_min, tau_max, tau_step, window;

  void attach(CLI::App* app, bool with_lambda = true) {
    app->add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    app->add_option("--beta", beta, "Dyson index (1, 2 or 4)");
    if (with_lambda) {
      app->add_option("--lambda", lambda, "set both couplings");
      app->add_option("--lambda-par", lambda_par, "diagonal coupling");
      app->add_option("--lambda-perp", lambda_perp, "off-diagonal coupling");
    }
    app->add_option("--n-levels", n_levels, "number of unperturbed levels N");
    app->add_option("--realizations", realizations, "Monte Carlo realizations R");
    app->add_option("--seed", seed, "master seed");
    app->add_option("--mode", mode, "spectrum mode: uniform or gaussian");
    app->add_option("--tau-min", tau_min, "first grid point (units of t_H)");
    app->add_option("--tau-max", tau_max, "last grid point (units of t_H)");
    app->add_option("--tau-step", tau_step, "grid step (units of t_H)");
    app->add_option("--workers", workers, std::string("worker threads (default ") + kWorkersEnv + " or 1)");
    app->add_option("--window", window, "central window fraction in (0, 1]");
  }

  ConfigPtr build() const {
    rmtfid_config* raw = nullptr;
    bool file_sets_workers = false;
    if (!config_path.empty()) {
      check(rmtfid_config_load(config_path.c_str(), &raw));
      std::ifstream in(config_path);
      const auto j = nlohmann::json::parse(in, nullptr, false);
      file_sets_workers = j.is_object() && j.contains("workers");
    } else {
      check(rmtfid_config_new(&raw));
    }
    ConfigPtr config(raw);
    rmtfid_config* c = config.get();
    if (!file_sets_workers)
      if (auto w = env_workers()) check(rmtfid_config_set_int(c, "workers", *w));
    if (beta) check(rmtfid_config_set_int(c, "beta", *beta));
    if (lambda) {
      check(rmtfid_config_set_real(c, "lambda_par", *lambda));
      check(rmtfid_config_set_real(c, "lambda_perp", *lambda));
    }
    if (lambda_par) check(rmtfid_config_set_real(c, "lambda_par", *lambda_par));
    if (lambda_perp) check(rmtfid_config_set_real(c, "lambda_perp", *lambda_perp));
    if (n_levels) check(rmtfid_config_set_int(c, "n_levels", *n_levels));
    if (realizations) check(rmtfid_config_set_int(c, "n_realizations", *realizations));
    if (seed) check(rmtfid_config_set_seed(c, *seed));
    if (mode) check(rmtfid_config_set_string(c, "mode", mode->c_str()));
    if (tau_min) check(rmtfid_config_set_real(c, "tau_min", *tau_min));
    if (tau_max) check(rmtfid_config_set_real(c, "tau_max", *tau_max));
    if (tau_step) check(rmtfid_config_set_real(c, "tau_step", *tau_step));
    if (workers) check(rmtfid_config_set_int(c, "workers", *workers));
    if (window) check(rmtfid_config_set_real(c, "window_fraction", *window));
    check(rmtfid_config_validate(c));
    return config;
  }
};

void progress_to_stderr(int done, int total, void* label) {
  const int step = total >= 20 ? total / 20 : 1;
  if (done % step == 0 || done == total)
    std::fprintf(stderr, "%s%d/%d realizations\n", static_cast<const char*>(label), done, total);
}

RunPtr simulate(const rmtfid_config* config, const char* label = "") {
  rmtfid_run* raw = nullptr;
  check(rmtfid_run_simulate(config, progress_to_stderr, const_cast<char*>(label), &raw));
  return RunPtr(raw);
}

std::string serialize(const rmtfid_run* run, rmtfid_format format) {
  char* raw = nullptr;
  check(rmtfid_run_serialize(run, format, &raw));
  return StringPtr(raw).get();
}

struct CompareFlags {
  std::string input;
  std::string input_format;
  rmtfid_thresholds thresholds{};

  void attach(CLI::App* app) {
    rmtfid_thresholds_default(&thresholds);
    app->add_option("--input", input, "previous simulate output (csv or json)")->check(CLI::ExistingFile);
    app->add_option("--input-format", input_format, "csv or json (default: by extension)");
    app->add_option("--z-max", thresholds.z_max, "largest allowed |z| of Re<f>");
    app->add_option("--z-point", thresholds.z_point, "per-point |z| bound");
    app->add_option("--f-fraction", thresholds.f_fraction, "required share of f points within --z-point");
    app->add_option("--fk-fraction", thresholds.fk_fraction, "required share of f-vs-K points within --z-point");
    app->add_option("--max-deviation", thresholds.max_abs_deviation, "largest allowed |Re<f> - theory|");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fidelity amplitude and cross form-factor of a Poissonian spectrum under a random perturbation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rmtfid_version());

  // moment-check
  int mc_beta = 2, mc_n = 32, mc_samples = 100000;
  std::uint64_t mc_seed = 1;
  std::string mc_out;
  auto* moment = app.add_subcommand("moment-check", "verify the sampler's second moments");
  moment->add_option("--beta", mc_beta, "Dyson index (1, 2 or 4)");
  moment->add_option("--n", mc_n, "matrix size N");
  moment->add_option("--samples", mc_samples, "number of sampled matrices");
  moment->add_option("--seed", mc_seed, "seed");
  moment->add_option("--out", mc_out, "output path (default stdout)");

  // simulate
  SimFlags sim_flags;
  std::string sim_out, sim_format;
  auto* sim = app.add_subcommand("simulate", "run the Monte Carlo ensemble and export statistics");
  sim_flags.attach(sim);
  sim->add_option("--out", sim_out, "output path (default stdout)");
  sim->add_option("--format", sim_format, "csv or json (default: by extension, else csv)");

  // theory
  int th_beta = 2;
  std::optional<double> th_lambda, th_lambda_par, th_lambda_perp, th_tau;
  double th_tau_min = 0.0, th_tau_max = 2.0, th_tau_step = 0.05;
  std::string th_out;
  auto* theory = app.add_subcommand("theory", "evaluate the closed-form average fidelity");
  theory->add_option("--beta", th_beta, "Dyson index (1, 2 or 4)");
  theory->add_option("--lambda", th_lambda, "set both couplings");
  theory->add_option("--lambda-par", th_lambda_par, "diagonal coupling");
  theory->add_option("--lambda-perp", th_lambda_perp, "off-diagonal coupling");
  theory->add_option("--tau", th_tau, "single time (units of t_H); omit for a curve");
  theory->add_option("--tau-min", th_tau_min, "curve start");
  theory->add_option("--tau-max", th_tau_max, "curve end");
  theory->add_option("--tau-step", th_tau_step, "curve step");
  theory->add_option("--out", th_out, "output path (default stdout)");

  // compare
  SimFlags cmp_flags;
  CompareFlags cmp;
  std::string cmp_out;
  auto* compare = app.add_subcommand("compare", "score Monte Carlo statistics against theory");
  cmp_flags.attach(compare);
  cmp.attach(compare);
  compare->add_option("--out", cmp_out, "report path (default stdout)");

  // reproduce-figure
  SimFlags fig_flags;
  std::string fig_dir = ".";
  auto* figure = app.add_subcommand("reproduce-figure", "emit MC and theory curves for beta = 1, 2, 4 at lambda = 0.1");
  fig_flags.attach(figure, false);
  figure->add_option("--out-dir", fig_dir, "directory for figure_beta{1,2,4}.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*moment) {
      char* raw = nullptr;
      int passed = 0;
      check(rmtfid_moment_check(mc_beta, mc_n, mc_samples, mc_seed, &raw, &passed));
      emit(StringPtr(raw).get(), mc_out);
      return passed ? kExitOk : kExitVerdict;
    }

    if (*sim) {
      const ConfigPtr config = sim_flags.build();
      const RunPtr run = simulate(config.get());
      emit(serialize(run.get(), format_for(sim_format, sim_out)), sim_out);
      return kExitOk;
    }

    if (*theory) {
      const double lpar = th_lambda_par.value_or(th_lambda.value_or(0.1));
      const double lperp = th_lambda_perp.value_or(th_lambda.value_or(0.1));
      if (th_tau) {
        double value = 0.0;
        check(rmtfid_theory_fidelity(lpar, lperp, th_beta, *th_tau, &value));
        emit(real(value) + "\n", th_out);
        return kExitOk;
      }
      if (!(th_tau_step > 0.0) || th_tau_max < th_tau_min)
        throw Failure(kExitUsage, "theory curve needs tau_step > 0 and tau_max >= tau_min");
      std::ostringstream out;
      out << "tau,theory\n";
      const auto count = static_cast<long>((th_tau_max - th_tau_min) / th_tau_step + 1e-9) + 1;
      for (long i = 0; i < count; ++i) {
        const double tau = th_tau_min + static_cast<double>(i) * th_tau_step;
        double value = 0.0;
        check(rmtfid_theory_fidelity(lpar, lperp, th_beta, tau, &value));
        out << real(tau) << ',' << real(value) << '\n';
      }
      emit(out.str(), th_out);
      return kExitOk;
    }

    if (*compare) {
      RunPtr run;
      if (!cmp.input.empty()) {
        rmtfid_run* raw = nullptr;
        check(rmtfid_run_load(cmp.input.c_str(), format_for(cmp.input_format, cmp.input), &raw));
        run.reset(raw);
      } else {
        const ConfigPtr config = cmp_flags.build();
        run = simulate(config.get());
      }
      rmtfid_report* raw_report = nullptr;
      check(rmtfid_compare(run.get(), &cmp.thresholds, &raw_report));
      const ReportPtr report(raw_report);
      char* json = nullptr;
      check(rmtfid_report_to_json(report.get(), &json));
      emit(std::string(StringPtr(json).get()) + "\n", cmp_out);
      return rmtfid_report_passed(report.get()) ? kExitOk : kExitVerdict;
    }

    if (*figure) {
      for (int beta : {1, 2, 4}) {
        ConfigPtr config = fig_flags.build();
        check(rmtfid_config_set_int(config.get(), "beta", beta));
        check(rmtfid_config_set_real(config.get(), "lambda_par", 0.1));
        check(rmtfid_config_set_real(config.get(), "lambda_perp", 0.1));
        const std::string label = "beta=" + std::to_string(beta) + ": ";
        const RunPtr run = simulate(config.get(), label.c_str());
        const std::string path = fig_dir + "/figure_beta" + std::to_string(beta) + ".csv";
        emit(serialize(run.get(), RMTFID_FORMAT_CSV), path);
        std::fprintf(stderr, "wrote %s\n", path.c_str());
      }
      return kExitOk;
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message().c_str());
    return f.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
