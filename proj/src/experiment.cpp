#include "rmtfid/experiment.hpp"

#include "rmtfid/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace rmtfid {

using cplx = std::complex<double>;

TimeGrid ExperimentConfig::grid() const {
  return TimeGrid::uniform(tau_min, tau_max, tau_step, model.heisenberg_time());
}

void ExperimentConfig::validate() const {
  spec.validate();
  if (n_realizations < 2) throw ConfigError("n_realizations must be at least 2");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (!(window_fraction > 0.0 && window_fraction <= 1.0))
    throw ConfigError("window_fraction must lie in (0, 1]");
  (void)grid();
}

EnsembleKey EnsembleKey::of(const ExperimentConfig& config) {
  return {config.model.n_levels(), config.model.mode(), config.spec, config.window_fraction,
          config.grid().taus()};
}

EnsembleStatistics::EnsembleStatistics(EnsembleKey key)
    : key_(std::move(key)), points_(key_.taus.size()) {}

void EnsembleStatistics::add(const RealizationSeries& series) {
  if (series.f.size() != points_.size() || series.k.size() != points_.size())
    throw ConfigError("realization series length does not match the statistics grid");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    points_[i].f_re.add(series.f[i].real());
    points_[i].f_im.add(series.f[i].imag());
    points_[i].k_re.add(series.k[i].real());
    points_[i].k_im.add(series.k[i].imag());
  }
  ++count_;
}

EnsembleStatistics EnsembleStatistics::merge(const EnsembleStatistics& a,
                                             const EnsembleStatistics& b) {
  if (!(a.key_ == b.key_))
    throw ConfigError("cannot merge statistics of different configurations or grids");
  EnsembleStatistics out(a.key_);
  out.count_ = a.count_ + b.count_;
  for (std::size_t i = 0; i < out.points_.size(); ++i) {
    const Point& pa = a.points_[i];
    const Point& pb = b.points_[i];
    out.points_[i] = {RunningMoments::merge(pa.f_re, pb.f_re), RunningMoments::merge(pa.f_im, pb.f_im),
                      RunningMoments::merge(pa.k_re, pb.k_re), RunningMoments::merge(pa.k_im, pb.k_im)};
  }
  return out;
}

cplx EnsembleStatistics::mean_f(std::size_t i) const {
  const Point& p = points_.at(i);
  return {p.f_re.mean(), p.f_im.mean()};
}

cplx EnsembleStatistics::mean_k(std::size_t i) const {
  const Point& p = points_.at(i);
  return {p.k_re.mean(), p.k_im.mean()};
}

bool operator==(const EnsembleStatistics& a, const EnsembleStatistics& b) {
  if (!(a.key_ == b.key_) || a.count_ != b.count_) return false;
  auto same = [](const RunningMoments& x, const RunningMoments& y) {
    return x.count() == y.count() && x.mean() == y.mean() && x.m2() == y.m2();
  };
  for (std::size_t i = 0; i < a.points_.size(); ++i) {
    const auto& p = a.points_[i];
    const auto& q = b.points_[i];
    if (!same(p.f_re, q.f_re) || !same(p.f_im, q.f_im) || !same(p.k_re, q.k_re) ||
        !same(p.k_im, q.k_im))
      return false;
  }
  return true;
}

EnsembleStatistics run_range(const ExperimentConfig& config, std::uint64_t first,
                             std::uint64_t last, const ProgressFn& progress) {
  config.validate();
  if (last < first) throw ConfigError("realization range is reversed");
  const TimeGrid grid = config.grid();
  const std::size_t total = last - first;

  std::vector<RealizationSeries> results(total);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mutex;
  std::exception_ptr first_error;
  std::uint64_t failing_index = 0;
  int done = 0;

  auto worker = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= total || failed.load()) return;
      const std::uint64_t index = first + slot;
      try {
        results[slot] = realize(config.model, config.spec, grid, config.master_seed, index,
                                config.window_fraction);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!first_error || index < failing_index) {
          first_error = std::current_exception();
          failing_index = index;
        }
        failed.store(true);
        return;
      }
      if (progress) {
        std::lock_guard lock(mutex);
        progress(++done, static_cast<int>(total));
      }
    }
  };

  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(config.workers), std::max<std::size_t>(total, 1));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }

  if (first_error) {
    const std::string where = "realization " + std::to_string(failing_index) + ": ";
    try {
      std::rethrow_exception(first_error);
    } catch (const Error& e) {
      throw Error(e.kind(), where + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorKind::numerical, where + e.what());
    }
  }

  EnsembleStatistics stats(EnsembleKey::of(config));
  for (const auto& series : results) stats.add(series);
  return stats;
}

EnsembleStatistics run(const ExperimentConfig& config, const ProgressFn& progress) {
  return run_range(config, 0, static_cast<std::uint64_t>(config.n_realizations), progress);
}

namespace {

double z_score(double diff, double standard_error) {
  diff = std::abs(diff);
  if (standard_error > 0.0) return diff / standard_error;
  return diff == 0.0 ? 0.0 : INFINITY;
}

}  // namespace

ComparisonReport compare(const EnsembleStatistics& stats, const TheoryCurve& theory,
                         bool exclude_tau_zero_for_k, const Thresholds& thresholds) {
  if (theory.taus != stats.taus() || theory.values.size() != stats.size())
    throw ConfigError("theory curve and statistics use different time grids");

  ComparisonReport report;
  int within_f = 0, within_imag = 0, k_points = 0, within_k = 0, within_fk = 0;
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& p = stats.point(i);
    ComparisonPoint c;
    c.tau = stats.taus()[i];
    c.theory = theory.values[i];
    c.abs_deviation = std::abs(p.f_re.mean() - c.theory);
    c.z_f = z_score(p.f_re.mean() - c.theory, p.f_re.standard_error());
    c.z_f_imag = z_score(p.f_im.mean(), p.f_im.standard_error());
    if (!(exclude_tau_zero_for_k && c.tau == 0.0)) {
      c.z_k = z_score(p.k_re.mean() - c.theory, p.k_re.standard_error());
      c.z_fk = z_score(p.f_re.mean() - p.k_re.mean(),
                       std::hypot(p.f_re.standard_error(), p.k_re.standard_error()));
      ++k_points;
      if (*c.z_k <= thresholds.z_point) ++within_k;
      if (*c.z_fk <= thresholds.z_point) ++within_fk;
      report.max_z_k = std::max(report.max_z_k, *c.z_k);
    }
    if (c.z_f <= thresholds.z_point) ++within_f;
    if (c.z_f_imag <= thresholds.z_point) ++within_imag;
    report.max_z_f = std::max(report.max_z_f, c.z_f);
    report.max_abs_deviation = std::max(report.max_abs_deviation, c.abs_deviation);
    report.max_imag_ratio = std::max(report.max_imag_ratio, c.z_f_imag);
    report.points.push_back(c);
  }

  const double n = static_cast<double>(std::max<std::size_t>(stats.size(), 1));
  report.fraction_f_within = within_f / n;
  report.fraction_imag_within = within_imag / n;
  report.fraction_k_within = k_points > 0 ? within_k / static_cast<double>(k_points) : 1.0;
  report.fraction_fk_within = k_points > 0 ? within_fk / static_cast<double>(k_points) : 1.0;

  report.passed = report.max_z_f <= thresholds.z_max &&
                  report.fraction_f_within >= thresholds.f_fraction &&
                  report.max_abs_deviation <= thresholds.max_abs_deviation &&
                  report.fraction_fk_within >= thresholds.fk_fraction &&
                  (!thresholds.require_k_vs_theory || report.fraction_k_within >= thresholds.k_fraction);
  return report;
}

std::string ComparisonReport::to_json() const {
  using json = nlohmann::ordered_json;
  auto finite_or_null = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  json j;
  j["passed"] = passed;
  j["summary"] = {{"max_z_f", finite_or_null(max_z_f)},
                  {"fraction_f_within", fraction_f_within},
                  {"max_abs_deviation", max_abs_deviation},
                  {"max_z_k", finite_or_null(max_z_k)},
                  {"fraction_k_within", fraction_k_within},
                  {"fraction_fk_within", fraction_fk_within},
                  {"max_imag_ratio", finite_or_null(max_imag_ratio)},
                  {"fraction_imag_within", fraction_imag_within}};
  j["points"] = json::array();
  for (const auto& c : points) {
    j["points"].push_back({{"tau", c.tau},
                           {"theory", c.theory},
                           {"z_f", finite_or_null(c.z_f)},
                           {"abs_deviation", c.abs_deviation},
                           {"z_k", c.z_k ? finite_or_null(*c.z_k) : json(nullptr)},
                           {"z_fk", c.z_fk ? finite_or_null(*c.z_fk) : json(nullptr)},
                           {"z_f_imag", finite_or_null(c.z_f_imag)}});
  }
  return j.dump(2);
}

}  // namespace rmtfid
