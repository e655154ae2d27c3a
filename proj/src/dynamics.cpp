#include "rmtfid/dynamics.hpp"

#include "rmtfid/error.hpp"
#include "rmtfid/rng.hpp"

#include <algorithm>
#include <cmath>

namespace rmtfid {

using cplx = std::complex<double>;

TimeGrid::TimeGrid(std::vector<double> taus, double heisenberg_time)
    : taus_(std::move(taus)), heisenberg_time_(heisenberg_time) {
  if (taus_.empty()) throw ConfigError("time grid must be nonempty");
  if (!(heisenberg_time_ > 0.0)) throw ConfigError("heisenberg time must be positive");
  for (std::size_t i = 0; i < taus_.size(); ++i) {
    if (!(taus_[i] >= 0.0) || !std::isfinite(taus_[i]))
      throw ConfigError("time grid entries must be finite and nonnegative");
    if (i > 0 && !(taus_[i] > taus_[i - 1]))
      throw ConfigError("time grid must be strictly increasing");
  }
}

TimeGrid TimeGrid::uniform(double tau_min, double tau_max, double tau_step, double heisenberg_time) {
  if (!(tau_step > 0.0)) throw ConfigError("tau_step must be positive");
  if (!(tau_min >= 0.0)) throw ConfigError("tau_min must be nonnegative");
  if (!(tau_max >= tau_min)) throw ConfigError("tau_max must not be below tau_min");
  const auto count = static_cast<std::size_t>(std::floor((tau_max - tau_min) / tau_step + 1e-9)) + 1;
  std::vector<double> taus(count);
  for (std::size_t i = 0; i < count; ++i) taus[i] = tau_min + static_cast<double>(i) * tau_step;
  return TimeGrid(std::move(taus), heisenberg_time);
}

Eigen::MatrixXcd assemble_hamiltonian(const SpectrumRealization& spectrum,
                                      const PerturbationMatrix& v_par,
                                      const PerturbationMatrix& v_perp,
                                      const PerturbationSpec& spec,
                                      const SpectrumModel& model) {
  const auto n = static_cast<Eigen::Index>(spectrum.levels.size());
  if (v_par.beta() != v_perp.beta() || v_par.dim() != v_perp.dim())
    throw ConfigError("parallel and perpendicular parts disagree in shape or class");
  if (v_par.beta() != spec.beta) throw ConfigError("perturbation class differs from spec beta");
  if (v_par.n_levels() != n)
    throw ConfigError("perturbation couples " + std::to_string(v_par.n_levels()) +
                      " levels but the spectrum has " + std::to_string(n));

  const double d = model.mean_spacing();
  const Eigen::Index dim = v_par.dim();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  if (spec.lambda_par != 0.0) h += (d * spec.lambda_par) * v_par.entries();
  if (spec.lambda_perp != 0.0) h += (d * spec.lambda_perp) * v_perp.entries();
  for (Eigen::Index i = 0; i < dim; ++i) h(i, i) += spectrum.levels[static_cast<std::size_t>(i % n)];
  return h;
}

namespace {

struct Window {
  // unperturbed levels [level_lo, level_hi), perturbed eigenvalue ranks [eig_lo, eig_hi)
  Eigen::Index level_lo, level_hi, eig_lo, eig_hi, multiplicity;
  double norm;
};

Window make_window(Eigen::Index n_levels, Eigen::Index dim, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("window_fraction must lie in (0, 1]");
  if (dim % n_levels != 0 || dim / n_levels > 2)
    throw ConfigError("decomposition dimension " + std::to_string(dim) +
                      " does not match " + std::to_string(n_levels) + " levels");
  const Eigen::Index mult = dim / n_levels;
  Eigen::Index width = n_levels;
  if (fraction < 1.0)
    width = std::max<Eigen::Index>(1, std::llround(fraction * static_cast<double>(n_levels)));
  const Eigen::Index lo = (n_levels - width) / 2;
  return {lo, lo + width, mult * lo, mult * (lo + width), mult,
          static_cast<double>(mult * width)};
}

// Unperturbed trace terms e^{+i E_n t} summed over the window, for each tau.
std::vector<cplx> unperturbed_trace(const SpectrumRealization& spectrum, const Window& w,
                                    const TimeGrid& grid) {
  std::vector<cplx> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.time(i);
    cplx sum = 0.0;
    for (Eigen::Index n = w.level_lo; n < w.level_hi; ++n) {
      const double phase = spectrum.levels[static_cast<std::size_t>(n)] * t;
      sum += cplx(std::cos(phase), std::sin(phase));
    }
    out[i] = static_cast<double>(w.multiplicity) * sum;
  }
  return out;
}

}  // namespace

std::vector<cplx> fidelity_series(const HamiltonianDecomposition& decomp,
                                  const SpectrumRealization& spectrum, const TimeGrid& grid,
                                  double window_fraction) {
  const Eigen::Index dim = decomp.eigenvalues.size();
  const auto n_levels = static_cast<Eigen::Index>(spectrum.levels.size());
  if (n_levels == 0) throw ConfigError("empty spectrum");
  const Window w = make_window(n_levels, dim, window_fraction);
  const auto steps = static_cast<Eigen::Index>(grid.size());

  // Phases of the perturbed propagator, one column per tau.
  Eigen::MatrixXd cos_eps(dim, steps), sin_eps(dim, steps);
  for (Eigen::Index s = 0; s < steps; ++s) {
    const double t = grid.time(static_cast<std::size_t>(s));
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double phase = decomp.eigenvalues(k) * t;
      cos_eps(k, s) = std::cos(phase);
      sin_eps(k, s) = -std::sin(phase);
    }
  }
  // <n| e^{-iHt} |n> for every basis state n and every tau.
  const Eigen::MatrixXd diag_re = decomp.weights * cos_eps;
  const Eigen::MatrixXd diag_im = decomp.weights * sin_eps;

  std::vector<cplx> out(grid.size());
  for (Eigen::Index s = 0; s < steps; ++s) {
    const double t = grid.time(static_cast<std::size_t>(s));
    cplx sum = 0.0;
    for (Eigen::Index copy = 0; copy < w.multiplicity; ++copy) {
      for (Eigen::Index n = w.level_lo; n < w.level_hi; ++n) {
        const double phase = spectrum.levels[static_cast<std::size_t>(n)] * t;
        const Eigen::Index basis = n + copy * n_levels;
        sum += cplx(std::cos(phase), std::sin(phase)) * cplx(diag_re(basis, s), diag_im(basis, s));
      }
    }
    out[static_cast<std::size_t>(s)] = sum / w.norm;
  }
  // At t = 0 every phase vanishes and each row of W sums to one.
  for (std::size_t s = 0; s < grid.size(); ++s)
    if (grid.taus()[s] == 0.0) out[s] = 1.0;
  return out;
}

std::vector<cplx> cross_form_factor_series(const HamiltonianDecomposition& decomp,
                                           const SpectrumRealization& spectrum,
                                           const TimeGrid& grid, double window_fraction) {
  const Eigen::Index dim = decomp.eigenvalues.size();
  const auto n_levels = static_cast<Eigen::Index>(spectrum.levels.size());
  if (n_levels == 0) throw ConfigError("empty spectrum");
  const Window w = make_window(n_levels, dim, window_fraction);
  const std::vector<cplx> trace0 = unperturbed_trace(spectrum, w, grid);

  std::vector<cplx> out(grid.size());
  for (std::size_t s = 0; s < grid.size(); ++s) {
    const double t = grid.time(s);
    cplx trace = 0.0;
    for (Eigen::Index k = w.eig_lo; k < w.eig_hi; ++k) {
      const double phase = decomp.eigenvalues(k) * t;
      trace += cplx(std::cos(phase), -std::sin(phase));
    }
    out[s] = trace * trace0[s] / (w.norm * static_cast<double>(w.multiplicity));
  }
  return out;
}

RealizationSeries evaluate_realization(const SpectrumRealization& spectrum,
                                       const PerturbationMatrix& v, const PerturbationSpec& spec,
                                       const SpectrumModel& model, const TimeGrid& grid,
                                       double window_fraction) {
  if (spec.lambda_par == 0.0 && spec.lambda_perp == 0.0) {
    // H = H0: the propagators cancel identically.
    const auto n = static_cast<Eigen::Index>(spectrum.levels.size());
    const Eigen::Index mult = v.dim() / std::max<Eigen::Index>(n, 1);
    if (n == 0 || v.n_levels() != n) throw ConfigError("perturbation does not match the spectrum");
    HamiltonianDecomposition trivial;
    trivial.eigenvalues.resize(v.dim());
    for (Eigen::Index i = 0; i < v.dim(); ++i)
      trivial.eigenvalues(i) = spectrum.levels[static_cast<std::size_t>(i / mult)];
    RealizationSeries out;
    out.f.assign(grid.size(), 1.0);
    out.k = cross_form_factor_series(trivial, spectrum, grid, window_fraction);
    return out;
  }
  const auto [v_par, v_perp] = split_perturbation(v);
  const Eigen::MatrixXcd h = assemble_hamiltonian(spectrum, v_par, v_perp, spec, model);
  const HamiltonianDecomposition decomp = decompose(h);
  RealizationSeries out;
  out.f = fidelity_series(decomp, spectrum, grid, window_fraction);
  out.k = cross_form_factor_series(decomp, spectrum, grid, window_fraction);
  return out;
}

RealizationSeries realize(const SpectrumModel& model, const PerturbationSpec& spec,
                          const TimeGrid& grid, std::uint64_t master_seed,
                          std::uint64_t realization_index, double window_fraction) {
  spec.validate();
  const SpectrumRealization spectrum =
      sample_poisson_spectrum(model, derive_seed(master_seed, realization_index, Stream::spectrum));
  const PerturbationMatrix v = sample_perturbation(
      spec.beta, model.n_levels(), derive_seed(master_seed, realization_index, Stream::perturbation));
  RealizationSeries out = evaluate_realization(spectrum, v, spec, model, grid, window_fraction);
  out.realization_index = realization_index;
  return out;
}

}  // namespace rmtfid
