#include "minidx/eigensolve.hpp"

#include "minidx/errors.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>

namespace minidx {

namespace {

Eigen::VectorXd residual_norms(const Eigen::MatrixXd& kx, const Eigen::MatrixXd& mx,
                               const Eigen::VectorXd& lambda, const Eigen::MatrixXd& x) {
  Eigen::VectorXd r(lambda.size());
  for (int i = 0; i < lambda.size(); ++i)
    r(i) = (kx.col(i) - lambda(i) * mx.col(i)).norm() / x.col(i).norm();
  return r;
}

}  // namespace

EigenPairs dense_lowest(const Eigen::MatrixXd& k, const Eigen::MatrixXd& m, int count) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, m);
  if (es.info() != Eigen::Success)
    throw SolverFailure("dense generalized eigensolve failed", std::nan(""));
  const int total = static_cast<int>(k.rows());
  const int take = count <= 0 ? total : std::min(count, total);
  EigenPairs out;
  out.values = es.eigenvalues().head(take);
  out.vectors = es.eigenvectors().leftCols(take);
  out.residuals = residual_norms(k * out.vectors, m * out.vectors, out.values, out.vectors);
  return out;
}

EigenPairs sparse_lowest(const SpMat& k, const SpMat& m, int count,
                         const ShiftInvertOptions& options) {
  const int n = static_cast<int>(k.rows());
  if (count <= 0 || count > n) throw SolverFailure("invalid eigenvalue count", std::nan(""));
  const int block = std::min(n, count + options.extra_vectors);

  SpMat shifted = k - options.shift * m;
  Eigen::SimplicialLDLT<SpMat> ldlt(shifted);
  if (ldlt.info() != Eigen::Success)
    throw SolverFailure("factorization of the shifted operator failed", std::nan(""));

  std::mt19937_64 rng(12345);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(n, block);
  for (int j = 0; j < block; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = g(rng);

  EigenPairs out;
  double worst = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::MatrixXd y = ldlt.solve(m * x);
    // Rayleigh-Ritz on span(y).
    Eigen::MatrixXd ky = k * y;
    Eigen::MatrixXd my = m * y;
    Eigen::MatrixXd kr = y.transpose() * ky;
    Eigen::MatrixXd mr = y.transpose() * my;
    kr = 0.5 * (kr + kr.transpose()).eval();
    mr = 0.5 * (mr + mr.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(kr, mr);
    if (es.info() != Eigen::Success)
      throw SolverFailure("Rayleigh-Ritz step failed", worst);
    x = y * es.eigenvectors();
    Eigen::VectorXd lambda = es.eigenvalues();
    Eigen::MatrixXd kx = ky * es.eigenvectors();
    Eigen::MatrixXd mx = my * es.eigenvectors();
    Eigen::VectorXd res = residual_norms(kx, mx, lambda, x);
    worst = 0.0;
    const int must = options.required < 0 ? count : std::min(count, options.required);
    for (int i = 0; i < must; ++i)
      worst = std::max(worst, res(i) / std::max(1.0, std::abs(lambda(i))));
    if (worst < options.tol) {
      out.values = lambda.head(count);
      out.vectors = x.leftCols(count);
      out.residuals = res.head(count);
      out.iterations = it;
      return out;
    }
  }
  throw SolverFailure("shift-invert iteration did not converge", worst);
}

}  // namespace minidx
