#pragma once

// Lowest eigenpairs of symmetric generalized problems K x = lambda M x.

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace minidx {

using SpMat = Eigen::SparseMatrix<double>;

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // M-orthonormal columns
  Eigen::VectorXd residuals;  // |K x - lambda M x| / |x|
  int iterations = 0;
};

/// Dense solve; returns the `count` lowest pairs (all when count <= 0).
EigenPairs dense_lowest(const Eigen::MatrixXd& k, const Eigen::MatrixXd& m, int count);

struct ShiftInvertOptions {
  double shift = 0.0;       // must lie below the wanted part of the spectrum
  double tol = 1e-9;        // residual target, relative to max(1, |lambda|)
  int max_iterations = 500;
  int extra_vectors = 6;    // guard vectors in the block
  int required = -1;        // leading pairs that must meet tol (all when < 0); the
                            // rest are returned as Ritz estimates
};

/// Shift-invert block subspace iteration with Rayleigh-Ritz for the `count`
/// eigenvalues closest above `shift`. Throws SolverFailure on stagnation.
EigenPairs sparse_lowest(const SpMat& k, const SpMat& m, int count,
                         const ShiftInvertOptions& options = {});

}  // namespace minidx
