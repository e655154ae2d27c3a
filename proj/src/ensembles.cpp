#include "rmtfid/ensembles.hpp"

#include "rmtfid/error.hpp"
#include "rmtfid/rng.hpp"
#include "rmtfid/running_moments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace rmtfid {

using cplx = std::complex<double>;

int to_int(Beta beta) noexcept { return static_cast<int>(beta); }

Beta beta_from_int(int value) {
  switch (value) {
    case 1: return Beta::orthogonal;
    case 2: return Beta::unitary;
    case 4: return Beta::symplectic;
    default: throw ConfigError("beta must be 1, 2 or 4, got " + std::to_string(value));
  }
}

std::string to_string(SpectrumMode mode) {
  return mode == SpectrumMode::gaussian ? "gaussian" : "uniform";
}

SpectrumMode spectrum_mode_from_string(const std::string& name) {
  if (name == "gaussian") return SpectrumMode::gaussian;
  if (name == "uniform") return SpectrumMode::uniform;
  throw ConfigError("unknown spectrum mode '" + name + "' (expected gaussian or uniform)");
}

SpectrumModel::SpectrumModel(int n_levels, SpectrumMode mode) : n_levels_(n_levels), mode_(mode) {
  if (n_levels < 2) throw ConfigError("n_levels must be at least 2, got " + std::to_string(n_levels));
  mean_spacing_ = 1.0 / std::sqrt(static_cast<double>(n_levels));
  heisenberg_time_ = 2.0 * std::numbers::pi / mean_spacing_;
}

void PerturbationSpec::validate() const {
  (void)beta_from_int(to_int(beta));
  if (!(lambda_par >= 0.0) || !std::isfinite(lambda_par))
    throw ConfigError("lambda_par must be finite and nonnegative");
  if (!(lambda_perp >= 0.0) || !std::isfinite(lambda_perp))
    throw ConfigError("lambda_perp must be finite and nonnegative");
}

double PerturbationSpec::spreading_width(double mean_spacing) const {
  return 2.0 * std::numbers::pi * lambda_perp * lambda_perp * mean_spacing;
}

PerturbationMatrix::PerturbationMatrix(Beta beta, Eigen::MatrixXcd entries)
    : beta_(beta), entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw ConfigError("perturbation matrix must be square");
  if (beta_ == Beta::symplectic && entries_.rows() % 2 != 0)
    throw ConfigError("beta=4 perturbation must have even dimension");
}

SpectrumRealization sample_poisson_spectrum(const SpectrumModel& model, std::uint64_t seed) {
  Engine engine = make_engine(seed);
  const auto n = static_cast<std::size_t>(model.n_levels());
  SpectrumRealization out;
  out.seed_id = seed;
  out.levels.resize(n);

  const double half_width = 0.5 * static_cast<double>(n) * model.mean_spacing();
  const double sigma = std::sqrt(static_cast<double>(n) / (2.0 * std::numbers::pi));

  for (;;) {
    if (model.mode() == SpectrumMode::uniform) {
      std::uniform_real_distribution<double> dist(-half_width, half_width);
      for (auto& e : out.levels) e = dist(engine);
    } else {
      std::normal_distribution<double> dist(0.0, sigma);
      for (auto& e : out.levels) e = dist(engine);
    }
    std::sort(out.levels.begin(), out.levels.end());
    if (std::adjacent_find(out.levels.begin(), out.levels.end()) == out.levels.end()) break;
  }
  return out;
}

PerturbationMatrix sample_perturbation(Beta beta, int n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("perturbation needs n >= 2, got " + std::to_string(n));
  Engine engine = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index m = n;

  switch (beta) {
    case Beta::orthogonal: {
      Eigen::MatrixXcd v(m, m);
      const double diag_sd = std::sqrt(2.0);
      for (Eigen::Index i = 0; i < m; ++i) {
        v(i, i) = diag_sd * normal(engine);
        for (Eigen::Index j = i + 1; j < m; ++j) {
          const double x = normal(engine);
          v(i, j) = x;
          v(j, i) = x;
        }
      }
      return PerturbationMatrix(beta, std::move(v));
    }
    case Beta::unitary: {
      Eigen::MatrixXcd v(m, m);
      const double off_sd = std::sqrt(0.5);
      for (Eigen::Index i = 0; i < m; ++i) {
        v(i, i) = normal(engine);
        for (Eigen::Index j = i + 1; j < m; ++j) {
          const double re = off_sd * normal(engine);
          const double im = off_sd * normal(engine);
          v(i, j) = cplx(re, im);
          v(j, i) = cplx(re, -im);
        }
      }
      return PerturbationMatrix(beta, std::move(v));
    }
    case Beta::symplectic: {
      // A Hermitian, B antisymmetric; every quaternion component has variance 1/4.
      Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(m, m);
      Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(m, m);
      const double diag_sd = std::sqrt(0.5);
      for (Eigen::Index i = 0; i < m; ++i) {
        a(i, i) = diag_sd * normal(engine);
        for (Eigen::Index j = i + 1; j < m; ++j) {
          const double are = 0.5 * normal(engine);
          const double aim = 0.5 * normal(engine);
          const double bre = 0.5 * normal(engine);
          const double bim = 0.5 * normal(engine);
          a(i, j) = cplx(are, aim);
          a(j, i) = cplx(are, -aim);
          b(i, j) = cplx(bre, bim);
          b(j, i) = -b(i, j);
        }
      }
      Eigen::MatrixXcd v(2 * m, 2 * m);
      v.topLeftCorner(m, m) = a;
      v.topRightCorner(m, m) = b;
      v.bottomLeftCorner(m, m) = -b.conjugate();
      v.bottomRightCorner(m, m) = a.conjugate();
      return PerturbationMatrix(beta, std::move(v));
    }
  }
  throw ConfigError("invalid beta");
}

std::pair<PerturbationMatrix, PerturbationMatrix> split_perturbation(const PerturbationMatrix& v) {
  const Eigen::MatrixXcd& full = v.entries();
  const Eigen::Index dim = v.dim();
  Eigen::MatrixXcd par = Eigen::MatrixXcd::Zero(dim, dim);
  if (v.beta() == Beta::symplectic) {
    const Eigen::Index m = v.n_levels();
    for (Eigen::Index i = 0; i < m; ++i) {
      par(i, i) = full(i, i);
      par(i, i + m) = full(i, i + m);
      par(i + m, i) = full(i + m, i);
      par(i + m, i + m) = full(i + m, i + m);
    }
  } else {
    par.diagonal() = full.diagonal();
  }
  // Each entry of full lands in exactly one of par / perp, so the sum is exact.
  Eigen::MatrixXcd perp = full - par;
  return {PerturbationMatrix(v.beta(), std::move(par)), PerturbationMatrix(v.beta(), std::move(perp))};
}

double self_duality_residual(const Eigen::MatrixXcd& v) {
  const Eigen::Index dim = v.rows();
  if (dim % 2 != 0) throw ConfigError("self-duality needs an even dimension");
  const Eigen::Index m = dim / 2;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(dim, dim);
  j.topRightCorner(m, m).setIdentity();
  j.bottomLeftCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  // J^{-1} = -J
  const Eigen::MatrixXcd dual = -(j.cast<cplx>() * v.transpose() * j.cast<cplx>());
  return (dual - v).cwiseAbs().maxCoeff();
}

namespace {

// Scalar observable V_ij V_kl: the real part for beta in {1, 2}; the scalar
// part (half trace) of the quaternion product for beta = 4.
double element_product(const PerturbationMatrix& v, Eigen::Index i, Eigen::Index j,
                       Eigen::Index k, Eigen::Index l) {
  const Eigen::MatrixXcd& e = v.entries();
  if (v.beta() != Beta::symplectic) return (e(i, j) * e(k, l)).real();
  const Eigen::Index m = v.n_levels();
  cplx trace = 0.0;
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q) trace += e(i + p * m, j + q * m) * e(k + q * m, l + p * m);
  return 0.5 * trace.real();
}

}  // namespace

double MomentReport::max_z() const {
  double out = 0.0;
  for (const auto& e : estimates) out = std::max(out, e.z);
  return out;
}

std::string MomentReport::to_json() const {
  nlohmann::ordered_json j;
  j["beta"] = to_int(beta);
  j["n"] = n;
  j["n_samples"] = n_samples;
  j["seed"] = seed;
  j["moments"] = nlohmann::ordered_json::array();
  for (const auto& e : estimates) {
    j["moments"].push_back({{"pattern", e.pattern},
                            {"empirical", e.empirical},
                            {"stderr", e.standard_error},
                            {"theory", e.theory},
                            {"z", e.z}});
  }
  j["max_z"] = max_z();
  j["passed"] = passed();
  return j.dump(2);
}

MomentReport moment_check(Beta beta, int n, long n_samples, std::uint64_t seed) {
  if (n_samples < 1000) throw ConfigError("moment_check needs at least 1000 samples");
  if (n < 2) throw ConfigError("moment_check needs n >= 2");

  const double b = static_cast<double>(to_int(beta));
  struct Pattern {
    const char* name;
    double theory;
  };
  const Pattern patterns[4] = {
      {"ijji", 1.0}, {"iiii", 2.0 / b}, {"ijij", 2.0 / b - 1.0}, {"iijj", 0.0}};
  RunningMoments acc[4];

  const Eigen::Index m = n;
  const double pairs = 0.5 * static_cast<double>(m * (m - 1));
  for (long s = 0; s < n_samples; ++s) {
    const PerturbationMatrix v =
        sample_perturbation(beta, n, derive_seed(seed, static_cast<std::uint64_t>(s), Stream::moments));
    double ijji = 0.0, iiii = 0.0, ijij = 0.0, iijj = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      iiii += element_product(v, i, i, i, i);
      for (Eigen::Index j = i + 1; j < m; ++j) {
        ijji += element_product(v, i, j, j, i);
        ijij += element_product(v, i, j, i, j);
        iijj += element_product(v, i, i, j, j);
      }
    }
    acc[0].add(ijji / pairs);
    acc[1].add(iiii / static_cast<double>(m));
    acc[2].add(ijij / pairs);
    acc[3].add(iijj / pairs);
  }

  MomentReport report;
  report.beta = beta;
  report.n = n;
  report.n_samples = n_samples;
  report.seed = seed;
  for (int p = 0; p < 4; ++p) {
    MomentEstimate e;
    e.pattern = patterns[p].name;
    e.empirical = acc[p].mean();
    e.standard_error = acc[p].standard_error();
    e.theory = patterns[p].theory;
    const double diff = std::abs(e.empirical - e.theory);
    e.z = e.standard_error > 0.0 ? diff / e.standard_error : (diff == 0.0 ? 0.0 : INFINITY);
    report.estimates.push_back(e);
  }
  return report;
}

}  // namespace rmtfid
