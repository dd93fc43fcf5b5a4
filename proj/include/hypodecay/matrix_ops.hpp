#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "hypodecay/errors.hpp"

namespace hypodecay {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Relative threshold for definiteness decisions; exposed as configuration on
// every operation that makes one.
inline constexpr double kDefaultPdTol = 1e-9;

// Eigenstructure summary with eigenvalues clustered to a tolerance.
// One entry per cluster; algebraic multiplicities sum to the dimension, and
// geometric <= algebraic for every cluster.
struct EigenData {
  std::vector<std::complex<double>> eigenvalues;
  std::vector<int> algebraic;
  std::vector<int> geometric;
  double cluster_tol = 0.0;

  bool defective() const {
    for (size_t i = 0; i < eigenvalues.size(); ++i)
      if (geometric[i] < algebraic[i]) return true;
    return false;
  }
};

// Default eigenvalue clustering tolerance: 1e-7 * (1 + ||A||).
double default_cluster_tol(const Eigen::Ref<const MatrixXd>& A);

// Largest singular value; exact 0 for the zero matrix.
double spectral_norm(const Eigen::Ref<const MatrixXd>& A);

// Matrix exponential e^A by scaling-and-squaring with a fixed-order Pade
// core (orders 3/5/7/9/13, order 13 after scaling; Higham-2005 coefficients).
MatrixXd expm(const Eigen::Ref<const MatrixXd>& A);

// Solves the continuous Lyapunov equation  C X + X C^T = 2 D  for symmetric X
// via Kronecker vectorization and a dense full-pivot solve.  C must be
// positive stable and D symmetric.  The result is symmetrized and its
// residual checked against rtol * (1 + ||D||).
MatrixXd solve_lyapunov(const Eigen::Ref<const MatrixXd>& C,
                        const Eigen::Ref<const MatrixXd>& D,
                        double rtol = 1e-10);

// Eigenvalues clustered within cluster_tol (<= 0 means the default scaled
// tolerance) with algebraic/geometric multiplicities per cluster.
EigenData eigen_analyze(const Eigen::Ref<const MatrixXd>& A, double cluster_tol = 0.0);

// True iff A (symmetric within tolerance) has min eigenvalue > tol * max(1, ||A||).
bool is_positive_definite(const Eigen::Ref<const MatrixXd>& A, double tol = kDefaultPdTol);

// Semidefinite variant: min eigenvalue >= -tol * max(1, ||A||).
bool is_positive_semidefinite(const Eigen::Ref<const MatrixXd>& A, double tol = kDefaultPdTol);

// Principal square root / inverse square root of a symmetric positive
// definite matrix via its eigendecomposition; rejects matrices whose smallest
// eigenvalue is below the scaled tolerance.
MatrixXd spd_sqrt(const Eigen::Ref<const MatrixXd>& K, double tol = kDefaultPdTol);
MatrixXd spd_inv_sqrt(const Eigen::Ref<const MatrixXd>& K, double tol = kDefaultPdTol);

// Square root of a symmetric positive semidefinite matrix: eigenvalues in
// [-tol*scale, 0] are clamped to zero, anything lower throws condition_error.
MatrixXd psd_sqrt(const Eigen::Ref<const MatrixXd>& K, double tol = kDefaultPdTol);

// Numerical rank with an absolute singular-value cutoff.
int rank_with_tol(const Eigen::Ref<const Eigen::MatrixXcd>& A, double tol);

}  // namespace hypodecay
