#include "rmtfid/theory.hpp"

#include "rmtfid/error.hpp"

#include <cmath>
#include <numbers>

namespace rmtfid {

namespace {
constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

double closed_form_in_x(double x_par, double lambda_perp, double beta, double tau) {
  return std::exp(-kFourPiSq * (x_par * tau * tau / beta + lambda_perp * lambda_perp * tau / 2.0));
}
}  // namespace

double fidelity_closed_form(double lambda_par, double lambda_perp, Beta beta, double tau) {
  if (!(tau >= 0.0)) throw DomainError("tau must be nonnegative");
  return closed_form_in_x(lambda_par * lambda_par, lambda_perp, to_int(beta), tau);
}

double log_fidelity_perturbative(double lambda, Beta beta, double tau, double c_corr) {
  const double gamma_over_d = 2.0 * std::numbers::pi * lambda * lambda;
  const double b = to_int(beta);
  return -2.0 * std::numbers::pi * gamma_over_d * (tau / 2.0 + tau * tau / b + c_corr);
}

double differential_identity_residual(double lambda_par, double lambda_perp, Beta beta, double tau,
                                      double step) {
  if (!(tau > 0.0)) throw DomainError("differential identity needs tau > 0");
  if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
  const double b = to_int(beta);
  const double x = lambda_par * lambda_par;

  auto g = [&](double xi) { return closed_form_in_x(xi, lambda_perp, b, tau); };
  const double h = step;
  double derivative;
  if (x >= 2.0 * h) {
    // five-point central stencil
    derivative = (-g(x + 2 * h) + 8 * g(x + h) - 8 * g(x - h) + g(x - 2 * h)) / (12 * h);
  } else {
    // fourth-order forward stencil near lambda_par = 0
    derivative =
        (-25 * g(x) + 48 * g(x + h) - 36 * g(x + 2 * h) + 16 * g(x + 3 * h) - 3 * g(x + 4 * h)) /
        (12 * h);
  }
  const double lhs = closed_form_in_x(x, lambda_perp, b, tau);
  const double rhs = -b / (kFourPiSq * tau * tau) * derivative;
  return std::abs(lhs - rhs);
}

double spreading_width(double lambda, double mean_spacing) {
  return 2.0 * std::numbers::pi * lambda * lambda * mean_spacing;
}

TheoryCurve make_theory_curve(const PerturbationSpec& spec, const std::vector<double>& taus) {
  TheoryCurve curve;
  curve.taus = taus;
  curve.params = spec;
  curve.values.reserve(taus.size());
  for (double tau : taus)
    curve.values.push_back(fidelity_closed_form(spec.lambda_par, spec.lambda_perp, spec.beta, tau));
  return curve;
}

}  // namespace rmtfid
