#pragma once

#include "rmtfid/ensembles.hpp"

#include <vector>

namespace rmtfid {

/// Average fidelity amplitude of a Poissonian system under a Gaussian
/// perturbation with separate diagonal and off-diagonal couplings:
///   <f> = exp(-4 pi^2 (lambda_par^2 tau^2 / beta + lambda_perp^2 tau / 2)).
/// Proven for lambda_par == lambda_perp; a hypothesis otherwise.
/// Throws DomainError for tau < 0.
double fidelity_closed_form(double lambda_par, double lambda_perp, Beta beta, double tau);

/// ln<f> = -2 pi (Gamma/D) (tau/2 + tau^2/beta + c_corr), Gamma/D = 2 pi lambda^2.
/// c_corr is the spectral-correlation correction of the unperturbed system; it
/// vanishes for a Poissonian spectrum.
double log_fidelity_perturbative(double lambda, Beta beta, double tau, double c_corr = 0.0);

/// |<f> + (beta / 4 pi^2 tau^2) d<K>/d(lambda_par^2)| evaluated on the closed
/// form, with <K> = <f>. Central difference in x = lambda_par^2, one-sided
/// when x < 2 step. Throws DomainError for tau <= 0 or step <= 0.
double differential_identity_residual(double lambda_par, double lambda_perp, Beta beta, double tau,
                                      double step);

/// Breit-Wigner spreading width Gamma = 2 pi lambda^2 D.
double spreading_width(double lambda, double mean_spacing);

struct TheoryCurve {
  std::vector<double> taus;
  std::vector<double> values;
  PerturbationSpec params;
};

TheoryCurve make_theory_curve(const PerturbationSpec& spec, const std::vector<double>& taus);

}  // namespace rmtfid
