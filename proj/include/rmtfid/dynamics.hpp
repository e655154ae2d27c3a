#pragma once

#include "rmtfid/ensembles.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace rmtfid {

/// Sampling times in units of the Heisenberg time, tau = t / t_H.
class TimeGrid {
 public:
  TimeGrid(std::vector<double> taus, double heisenberg_time);

  /// tau_min, tau_min + step, ... up to tau_max (inclusive within 1e-9 step).
  static TimeGrid uniform(double tau_min, double tau_max, double tau_step, double heisenberg_time);

  const std::vector<double>& taus() const noexcept { return taus_; }
  std::size_t size() const noexcept { return taus_.size(); }
  double heisenberg_time() const noexcept { return heisenberg_time_; }
  double time(std::size_t i) const noexcept { return taus_[i] * heisenberg_time_; }

 private:
  std::vector<double> taus_;
  double heisenberg_time_;
};

struct HamiltonianDecomposition {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd weights;      // weights(n, k) = |<n|k>|^2, doubly stochastic
};

/// H = H0 + D lambda_par V_par + D lambda_perp V_perp, with H0 = diag(levels)
/// (diag(levels) (x) 1_2 in the block ordering of PerturbationMatrix for beta = 4).
Eigen::MatrixXcd assemble_hamiltonian(const SpectrumRealization& spectrum,
                                      const PerturbationMatrix& v_par,
                                      const PerturbationMatrix& v_perp,
                                      const PerturbationSpec& spec,
                                      const SpectrumModel& model);

/// Dense Hermitian eigendecomposition (single-threaded, hence bitwise
/// reproducible for a given build). A purely real input takes the real
/// symmetric path. Throws NumericalError on non-convergence or if the
/// resulting weight matrix is not doubly stochastic within 1e-10.
HamiltonianDecomposition decompose(const Eigen::MatrixXcd& h);

/// f(tau) = (1/dim) sum_n e^{i E_n t} sum_k W(n,k) e^{-i eps_k t}.
///
/// window_fraction < 1 restricts both traces to the central fraction of the
/// levels (by rank); the default traces over everything.
std::vector<std::complex<double>> fidelity_series(const HamiltonianDecomposition& decomp,
                                                  const SpectrumRealization& spectrum,
                                                  const TimeGrid& grid,
                                                  double window_fraction = 1.0);

/// K(tau) = (1/dim) (sum_k e^{-i eps_k t}) (sum_n e^{i E_n t}). The tau = 0 value
/// is dim and carries the singular contribution the ensemble average drops.
/// For beta = 4 both traces count each Kramers doublet once (quaternion
/// trace), so K = (1/(2 dim)) Tr Tr and K(0) = N.
std::vector<std::complex<double>> cross_form_factor_series(const HamiltonianDecomposition& decomp,
                                                           const SpectrumRealization& spectrum,
                                                           const TimeGrid& grid,
                                                           double window_fraction = 1.0);

struct RealizationSeries {
  std::vector<std::complex<double>> f;
  std::vector<std::complex<double>> k;
  std::uint64_t realization_index = 0;
};

/// Split, assemble, decompose and evaluate both series for given samples.
RealizationSeries evaluate_realization(const SpectrumRealization& spectrum,
                                       const PerturbationMatrix& v,
                                       const PerturbationSpec& spec,
                                       const SpectrumModel& model,
                                       const TimeGrid& grid,
                                       double window_fraction = 1.0);

/// Deterministic in (model, spec, grid, master_seed, realization_index, window_fraction).
RealizationSeries realize(const SpectrumModel& model, const PerturbationSpec& spec,
                          const TimeGrid& grid, std::uint64_t master_seed,
                          std::uint64_t realization_index, double window_fraction = 1.0);

}  // namespace rmtfid
