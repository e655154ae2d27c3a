#pragma once

#include "rmtfid/dynamics.hpp"
#include "rmtfid/ensembles.hpp"
#include "rmtfid/running_moments.hpp"
#include "rmtfid/theory.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace rmtfid {

struct ExperimentConfig {
  SpectrumModel model{256, SpectrumMode::uniform};
  PerturbationSpec spec{Beta::unitary, 0.1, 0.1};
  double tau_min = 0.0;
  double tau_max = 2.0;
  double tau_step = 0.05;
  int n_realizations = 400;
  std::uint64_t master_seed = 1;
  int workers = 1;  // scheduling hint; never changes results
  // Central share of the unperturbed levels the traces run over. Levels near
  // the band edges pick up a position-dependent second-order shift (the
  // Hilbert transform of the finite band) that dephases the full trace at
  // order lambda^4 tau^2 regardless of N.
  double window_fraction = 0.5;

  TimeGrid grid() const;
  /// Throws ConfigError on any violated invariant.
  void validate() const;
};

/// The physical parameters two statistics must share before they can merge.
struct EnsembleKey {
  int n_levels = 0;
  SpectrumMode mode = SpectrumMode::uniform;
  PerturbationSpec spec;
  double window_fraction = 1.0;
  std::vector<double> taus;

  static EnsembleKey of(const ExperimentConfig& config);
  friend bool operator==(const EnsembleKey&, const EnsembleKey&) = default;
};

/// Per-tau running moments of Re/Im f and Re/Im K over realizations.
class EnsembleStatistics {
 public:
  struct Point {
    RunningMoments f_re, f_im, k_re, k_im;
  };

  explicit EnsembleStatistics(EnsembleKey key);

  void add(const RealizationSeries& series);
  static EnsembleStatistics merge(const EnsembleStatistics& a, const EnsembleStatistics& b);

  const EnsembleKey& key() const noexcept { return key_; }
  const std::vector<double>& taus() const noexcept { return key_.taus; }
  std::size_t size() const noexcept { return points_.size(); }
  std::int64_t count() const noexcept { return count_; }

  const Point& point(std::size_t i) const { return points_.at(i); }
  Point& point(std::size_t i) { return points_.at(i); }
  void set_count(std::int64_t count) { count_ = count; }

  std::complex<double> mean_f(std::size_t i) const;
  std::complex<double> mean_k(std::size_t i) const;

  friend bool operator==(const EnsembleStatistics& a, const EnsembleStatistics& b);

 private:
  EnsembleKey key_;
  std::int64_t count_ = 0;
  std::vector<Point> points_;
};

/// Called after each realization finishes with (completed, total).
using ProgressFn = std::function<void(int, int)>;

/// Monte Carlo over realizations [0, n_realizations). Results are accumulated
/// in realization order, so they are bit-identical for any worker count.
EnsembleStatistics run(const ExperimentConfig& config, const ProgressFn& progress = {});

/// Same as run, restricted to realization indices [first, last).
EnsembleStatistics run_range(const ExperimentConfig& config, std::uint64_t first,
                             std::uint64_t last, const ProgressFn& progress = {});

struct Thresholds {
  double z_max = INFINITY;         // optional cap on any single f point
  double f_fraction = 0.95;        // share of points with z_f <= z_point
  double z_point = 3.0;
  double max_abs_deviation = 0.015;
  double fk_fraction = 0.90;       // share of tau > 0 points with z_fk <= z_point
  bool require_k_vs_theory = false;
  double k_fraction = 0.90;
};

struct ComparisonPoint {
  double tau = 0.0;
  double theory = 0.0;
  double z_f = 0.0;
  double abs_deviation = 0.0;
  std::optional<double> z_k;   // tau > 0 only when tau = 0 is excluded
  std::optional<double> z_fk;
  double z_f_imag = 0.0;
};

struct ComparisonReport {
  std::vector<ComparisonPoint> points;
  double max_z_f = 0.0;
  double fraction_f_within = 0.0;
  double max_abs_deviation = 0.0;
  double max_z_k = 0.0;
  double fraction_k_within = 0.0;
  double fraction_fk_within = 0.0;
  double max_imag_ratio = 0.0;
  double fraction_imag_within = 0.0;
  bool passed = false;

  std::string to_json() const;
};

/// Scores Re<f> and Re<K> against theory and <f> against <K>. A zero standard
/// error scores 0 on an exact match and infinity otherwise.
ComparisonReport compare(const EnsembleStatistics& stats, const TheoryCurve& theory,
                         bool exclude_tau_zero_for_k = true, const Thresholds& thresholds = {});

}  // namespace rmtfid
