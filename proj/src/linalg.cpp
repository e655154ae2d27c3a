#include "rmtfid/dynamics.hpp"
#include "rmtfid/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace rmtfid {

namespace {

double stochasticity_residual(const Eigen::MatrixXd& w) {
  const double rows = (w.rowwise().sum().array() - 1.0).abs().maxCoeff();
  const double cols = (w.colwise().sum().array() - 1.0).abs().maxCoeff();
  return std::max(rows, cols);
}

template <typename Matrix>
Eigen::SelfAdjointEigenSolver<Matrix> solve(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw NumericalError("Hermitian eigensolver did not converge", h.rows(), NAN);
  return solver;
}

}  // namespace

HamiltonianDecomposition decompose(const Eigen::MatrixXcd& h) {
  const Eigen::Index dim = h.rows();
  if (dim == 0 || h.cols() != dim) throw ConfigError("decompose needs a nonempty square matrix");

  HamiltonianDecomposition out;
  if (h.imag().isZero(0.0)) {
    const auto solver = solve<Eigen::MatrixXd>(h.real());
    out.eigenvalues = solver.eigenvalues();
    out.weights = solver.eigenvectors().array().square().matrix();
  } else {
    const auto solver = solve<Eigen::MatrixXcd>(h);
    out.eigenvalues = solver.eigenvalues();
    out.weights = solver.eigenvectors().cwiseAbs2();
  }

  const double residual = stochasticity_residual(out.weights);
  if (!(residual <= 1e-10))
    throw NumericalError("eigenvector matrix is not unitary to 1e-10", dim, residual);
  return out;
}

}  // namespace rmtfid
