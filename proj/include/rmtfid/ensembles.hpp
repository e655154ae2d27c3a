#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace rmtfid {

/// Dyson index of the perturbation ensemble.
enum class Beta : int { orthogonal = 1, unitary = 2, symplectic = 4 };

int to_int(Beta beta) noexcept;
/// Throws ConfigError unless value is 1, 2 or 4.
Beta beta_from_int(int value);

enum class SpectrumMode { gaussian, uniform };

std::string to_string(SpectrumMode mode);
SpectrumMode spectrum_mode_from_string(const std::string& name);

/// The unperturbed Poissonian system: N levels with mean spacing D = N^{-1/2}
/// at the band centre and Heisenberg time t_H = 2 pi / D.
class SpectrumModel {
 public:
  explicit SpectrumModel(int n_levels, SpectrumMode mode = SpectrumMode::uniform);

  int n_levels() const noexcept { return n_levels_; }
  SpectrumMode mode() const noexcept { return mode_; }
  double mean_spacing() const noexcept { return mean_spacing_; }
  double heisenberg_time() const noexcept { return heisenberg_time_; }

  friend bool operator==(const SpectrumModel&, const SpectrumModel&) = default;

 private:
  int n_levels_;
  SpectrumMode mode_;
  double mean_spacing_;
  double heisenberg_time_;
};

struct SpectrumRealization {
  std::vector<double> levels;  // strictly ascending
  std::uint64_t seed_id = 0;
};

/// Symmetry class and the two coupling strengths of H = H0 + D(l_par V_par + l_perp V_perp).
struct PerturbationSpec {
  Beta beta = Beta::unitary;
  double lambda_par = 0.0;
  double lambda_perp = 0.0;

  static PerturbationSpec equal_coupling(Beta beta, double lambda) {
    return {beta, lambda, lambda};
  }
  void validate() const;
  /// Gamma = 2 pi lambda^2 D; only meaningful for equal couplings.
  double spreading_width(double mean_spacing) const;

  friend bool operator==(const PerturbationSpec&, const PerturbationSpec&) = default;
};

/// A sampled Hermitian perturbation. For beta = 4 the matrix is stored in the
/// 2N complex representation [[A, B], [-B*, A*]]; the Kramers partner of basis
/// state i is i + N.
class PerturbationMatrix {
 public:
  PerturbationMatrix(Beta beta, Eigen::MatrixXcd entries);

  Beta beta() const noexcept { return beta_; }
  Eigen::Index dim() const noexcept { return entries_.rows(); }
  /// Number of distinct unperturbed levels the matrix couples.
  Eigen::Index n_levels() const noexcept {
    return beta_ == Beta::symplectic ? dim() / 2 : dim();
  }
  const Eigen::MatrixXcd& entries() const noexcept { return entries_; }

 private:
  Beta beta_;
  Eigen::MatrixXcd entries_;
};

SpectrumRealization sample_poisson_spectrum(const SpectrumModel& model, std::uint64_t seed);

/// Gaussian ensemble with <V_ij V_kl> = d_il d_jk + (2/beta - 1) d_ik d_jl.
PerturbationMatrix sample_perturbation(Beta beta, int n, std::uint64_t seed);

/// Splits V into the part commuting with a diagonal H0 (the diagonal, or the
/// 2x2 Kramers blocks for beta = 4) and the remainder. V_par + V_perp == V exactly.
std::pair<PerturbationMatrix, PerturbationMatrix> split_perturbation(const PerturbationMatrix& v);

/// J V^T J^{-1} - V for the standard symplectic unit J; zero for a self-dual matrix.
double self_duality_residual(const Eigen::MatrixXcd& v);

struct MomentEstimate {
  std::string pattern;  // "ijji", "iiii", "ijij" or "iijj"
  double empirical = 0.0;
  double standard_error = 0.0;
  double theory = 0.0;
  double z = 0.0;
};

struct MomentReport {
  Beta beta = Beta::unitary;
  int n = 0;
  long n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<MomentEstimate> estimates;

  double max_z() const;
  bool passed(double z_threshold = 5.0) const { return max_z() <= z_threshold; }
  std::string to_json() const;
};

/// Empirical second moments of sample_perturbation over n_samples draws. Each
/// draw contributes one observation per pattern, averaged over all index
/// pairs in that draw; for beta = 4 the product is the scalar part of the
/// quaternion product.
MomentReport moment_check(Beta beta, int n, long n_samples, std::uint64_t seed);

}  // namespace rmtfid
