// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Usage: rmtfid_acceptance <path-to-rmtfid-cli> [scratch-dir]

#include "rmtfid/dynamics.hpp"
#include "rmtfid/ensembles.hpp"
#include "rmtfid/experiment.hpp"
#include "rmtfid/io.hpp"
#include "rmtfid/rng.hpp"
#include "rmtfid/theory.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>

using namespace rmtfid;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr Beta kBetas[] = {Beta::orthogonal, Beta::unitary, Beta::symplectic};

int failures = 0;

void verdict(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s -- %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

int default_workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

ExperimentConfig desk_config(Beta beta, double lpar, double lperp) {
  ExperimentConfig c;
  c.model = SpectrumModel(256, SpectrumMode::uniform);
  c.spec = {beta, lpar, lperp};
  c.tau_min = 0.05;
  c.tau_max = 2.0;
  c.tau_step = 0.05;
  c.n_realizations = 400;
  c.master_seed = 1;
  c.workers = default_workers();
  return c;
}

void criterion_moments() {
  const auto start = Clock::now();
  bool ok = true;
  std::ostringstream detail;
  for (Beta beta : kBetas) {
    const auto report = moment_check(beta, 32, 100000, 1);
    ok = ok && report.passed(5.0);
    detail << "beta=" << to_int(beta) << " max|z|=" << fmt(report.max_z(), 3) << "; ";
  }
  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 60.0;
  detail << "time " << fmt(elapsed, 3) << " s";
  verdict(1, "sampler second moments within 5 stderr", ok, detail.str());
}

struct DeskRun {
  Beta beta;
  EnsembleStatistics stats;
  ComparisonReport report;
};

std::vector<DeskRun> criteria_closed_form_and_identity() {
  const auto start = Clock::now();
  std::vector<DeskRun> runs;
  for (Beta beta : kBetas) {
    const auto c = desk_config(beta, 0.1, 0.1);
    auto stats = run(c);
    auto report = compare(stats, make_theory_curve(c.spec, stats.taus()));
    runs.push_back({beta, std::move(stats), std::move(report)});
    std::fprintf(stderr, "beta=%d done after %.1f s\n", to_int(beta), seconds_since(start));
  }
  const double elapsed = seconds_since(start);

  // Spot values against an independent evaluation of the closed form.
  bool spots = true;
  std::ostringstream spot_detail;
  for (Beta beta : kBetas) {
    const double b = to_int(beta);
    const double oracle = std::exp(-4.0 * 0.01 * M_PI * M_PI * (1.0 / b + 0.5));
    const double value = fidelity_closed_form(0.1, 0.1, beta, 1.0);
    spots = spots && std::abs(value - oracle) <= 1e-14;
    spot_detail << format_real(value).substr(0, 8) << " ";
  }

  bool ok = spots && elapsed <= 600.0;
  std::ostringstream detail;
  for (const auto& r : runs) {
    ok = ok && r.report.fraction_f_within >= 0.95 && r.report.max_abs_deviation <= 0.015;
    detail << "beta=" << to_int(r.beta) << " within3=" << fmt(r.report.fraction_f_within, 3)
           << " maxdev=" << fmt(r.report.max_abs_deviation, 3) << "; ";
  }
  detail << "theory(tau=1)=" << spot_detail.str() << "; time " << fmt(elapsed, 3) << " s";
  verdict(2, "closed form matches Monte Carlo for beta 1, 2, 4", ok, detail.str());

  bool ok3 = true;
  std::ostringstream d3;
  for (const auto& r : runs) {
    ok3 = ok3 && r.report.fraction_fk_within >= 0.90;
    d3 << "beta=" << to_int(r.beta) << " f~K within3=" << fmt(r.report.fraction_fk_within, 3) << "; ";
  }
  verdict(3, "average fidelity equals average cross form factor", ok3, d3.str());
  return runs;
}

void criterion_split_coupling() {
  bool ok = true;
  std::ostringstream detail;
  for (auto [lpar, lperp] : {std::pair{0.15, 0.05}, std::pair{0.05, 0.15}}) {
    const auto c = desk_config(Beta::unitary, lpar, lperp);
    const auto stats = run(c);
    const auto report = compare(stats, make_theory_curve(c.spec, stats.taus()));
    ok = ok && report.fraction_f_within >= 0.95;
    detail << "(" << lpar << ", " << lperp << ") within3=" << fmt(report.fraction_f_within, 3)
           << " maxdev=" << fmt(report.max_abs_deviation, 3) << "; ";
  }
  verdict(4, "split-coupling formula holds for unequal couplings", ok, detail.str());
}

void criterion_perturbative() {
  const auto start = Clock::now();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lambda(0.0, 1.0), tau(0.0, 3.0);
  std::uniform_int_distribution<int> pick(0, 2);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double l = lambda(rng), t = tau(rng);
    const Beta beta = kBetas[pick(rng)];
    worst = std::max(worst, std::abs(std::exp(log_fidelity_perturbative(l, beta, t, 0.0)) -
                                     fidelity_closed_form(l, l, beta, t)));
  }
  const double elapsed = seconds_since(start);
  verdict(5, "exponentiated second order equals the closed form", worst <= 1e-12 && elapsed < 1.0,
          "max |diff|=" + fmt(worst, 3) + " over 1000 points, " + fmt(elapsed * 1e3, 3) + " ms");
}

void criterion_differential_identity() {
  const auto start = Clock::now();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> lambda(0.0, 1.0), tau(0.05, 3.0);
  std::uniform_int_distribution<int> pick(0, 2);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double lp = lambda(rng), lq = lambda(rng), t = tau(rng);
    worst = std::max(worst, differential_identity_residual(lp, lq, kBetas[pick(rng)], t, 1e-5));
  }
  const double elapsed = seconds_since(start);
  verdict(6, "differential identity residual", worst <= 1e-8 && elapsed < 1.0,
          "max residual=" + fmt(worst, 3) + " over 1000 points, " + fmt(elapsed * 1e3, 3) + " ms");
}

void criterion_beta_ordering(const std::vector<DeskRun>& runs) {
  std::map<int, std::pair<double, double>> at_one;
  for (const auto& r : runs) {
    const auto& taus = r.stats.taus();
    const auto it = std::min_element(taus.begin(), taus.end(), [](double a, double b) {
      return std::abs(a - 1.0) < std::abs(b - 1.0);
    });
    const auto& p = r.stats.point(static_cast<std::size_t>(it - taus.begin()));
    at_one[to_int(r.beta)] = {p.f_re.mean(), p.f_re.standard_error()};
  }
  auto gap = [&](int lo, int hi) {
    const auto [m1, s1] = at_one[lo];
    const auto [m2, s2] = at_one[hi];
    return (m2 - m1) / std::hypot(s1, s2);
  };
  const double g12 = gap(1, 2), g24 = gap(2, 4);
  std::ostringstream detail;
  detail << "means " << fmt(at_one[1].first, 5) << " < " << fmt(at_one[2].first, 5) << " < "
         << fmt(at_one[4].first, 5) << ", gaps " << fmt(g12, 3) << " and " << fmt(g24, 3) << " sigma";
  verdict(7, "fidelity ordered by beta at tau = 1", g12 > 3.0 && g24 > 3.0, detail.str());
}

void criterion_oracle() {
  // Brute force: f = Tr(e^{i H0 t} e^{-i H t}) / dim,
  // K = Tr e^{-i H t} Tr e^{i H0 t} / (dim * mult).
  double worst = 0.0;
  int instances = 0;
  for (int inst = 0; inst < 10; ++inst) {
    const Beta beta = kBetas[inst % 3];
    const int n = beta == Beta::symplectic ? 2 + inst % 3 : 3 + inst % 6;
    const SpectrumModel model(n, inst % 2 ? SpectrumMode::gaussian : SpectrumMode::uniform);
    const PerturbationSpec spec{beta, 0.2 + 0.05 * inst, 0.6 - 0.03 * inst};
    const auto spectrum = sample_poisson_spectrum(model, derive_seed(77, inst, Stream::spectrum));
    const auto v = sample_perturbation(beta, n, derive_seed(77, inst, Stream::perturbation));
    std::vector<double> taus;
    for (int s = 0; s < 10; ++s) taus.push_back(0.05 + 0.2 * s);
    const TimeGrid grid(taus, model.heisenberg_time());
    const auto series = evaluate_realization(spectrum, v, spec, model, grid);

    const Eigen::Index dim = v.dim();
    const double mult = static_cast<double>(dim / n);
    Eigen::MatrixXcd h0 = Eigen::MatrixXcd::Zero(dim, dim), h(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      h0(i, i) = spectrum.levels[static_cast<std::size_t>(i % n)];
      for (Eigen::Index j = 0; j < dim; ++j)
        h(i, j) = model.mean_spacing() * (i % n == j % n ? spec.lambda_par : spec.lambda_perp) *
                  v.entries()(i, j);
    }
    h += h0;
    const std::complex<double> iu(0.0, 1.0);
    for (std::size_t s = 0; s < grid.size(); ++s) {
      const double t = grid.time(s);
      const Eigen::MatrixXcd u0 = (iu * t * h0).exp();
      const Eigen::MatrixXcd u = (-iu * t * h).exp();
      const auto f = (u0 * u).trace() / double(dim);
      const auto k = u.trace() * u0.trace() / (double(dim) * mult);
      worst = std::max({worst, std::abs(series.f[s] - f), std::abs(series.k[s] - k)});
    }
    ++instances;
  }
  verdict(8, "spectral evaluation matches matrix exponentials", worst <= 1e-10,
          std::to_string(instances) + " instances x 10 times, max |diff|=" + fmt(worst, 3));
}

void criterion_determinism(const std::string& cli, const fs::path& dir) {
  fs::create_directories(dir);
  const fs::path config = dir / "determinism.json";
  write_file(config.string(),
             R"({"n_levels": 48, "beta": 4, "lambda_par": 0.2, "lambda_perp": 0.1, "n_realizations": 24,
  "master_seed": 99, "tau_max": 1.0, "tau_step": 0.1})");
  bool ok = true;
  std::ostringstream detail;
  for (const char* format : {"csv", "json"}) {
    std::string reference;
    for (int workers : {1, 2, 8}) {
      const fs::path out = dir / ("determinism_w" + std::to_string(workers) + "." + format);
      const std::string cmd = "\"" + cli + "\" simulate --config \"" + config.string() +
                              "\" --workers " + std::to_string(workers) + " --format " + format +
                              " --out \"" + out.string() + "\" 2>/dev/null";
      const int status = std::system(cmd.c_str());
      if (status != 0) {
        ok = false;
        detail << format << " workers=" << workers << " exit status " << status << "; ";
        continue;
      }
      const std::string bytes = read_file(out.string());
      if (reference.empty()) reference = bytes;
      else if (bytes != reference) {
        ok = false;
        detail << format << " workers=" << workers << " differs; ";
      }
    }
    detail << format << " " << reference.size() << " bytes; ";
  }
  verdict(9, "simulate output identical for workers 1, 2, 8", ok, detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <rmtfid-cli> [scratch-dir]\n", argv[0]);
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path scratch = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "rmtfid_acceptance";

  try {
    criterion_moments();
    const auto runs = criteria_closed_form_and_identity();
    criterion_split_coupling();
    criterion_perturbative();
    criterion_differential_identity();
    criterion_beta_ordering(runs);
    criterion_oracle();
    criterion_determinism(cli, scratch);
  } catch (const std::exception& e) {
    std::printf("[FAIL] aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
