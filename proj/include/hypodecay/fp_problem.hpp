#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "hypodecay/errors.hpp"
#include "hypodecay/matrix_ops.hpp"

namespace hypodecay {

/// A linear-drift Fokker-Planck problem in its given coordinates: drift
/// matrix C_tilde and constant diffusion matrix D_tilde (symmetric, PSD).
struct FpProblem {
  MatrixXd C_tilde;
  MatrixXd D_tilde;
  std::string label;

  int dim() const { return static_cast<int>(C_tilde.rows()); }

  /// Shape and symmetry checks; throws invalid_input_error on violation.
  void validate(double sym_tol = 1e-12) const;
};

/// The three ingredients of the well-posedness condition, reported
/// separately so a failure names its cause.
struct ConditionReport {
  bool cs_psd = false;          // diffusion matrix is positive semidefinite
  bool kawashima_ok = false;    // rank condition: no stationary direction escapes diffusion
  bool positive_stable = false; // every drift eigenvalue has positive real part
  std::string details;

  bool all() const { return cs_psd && kawashima_ok && positive_stable; }
};

/// Spectral decay data of a drift matrix: the gap mu (smallest real part
/// among eigenvalues), whether a gap eigenvalue is defective, and the
/// largest Jordan block size M among gap eigenvalues.
struct SpectralGap {
  double mu = 0.0;
  bool defective = false;
  int M = 1;
};

/// The problem after the change of variables that symmetrizes the
/// equilibrium: C = K^{-1/2} C_tilde K^{1/2} has symmetric part
/// C_S = K^{-1/2} D_tilde K^{-1/2}, where K solves
/// C_tilde K + K C_tilde^T = 2 D_tilde.
struct NormalizedFp {
  int d = 0;
  MatrixXd C;           // normalized drift
  MatrixXd K;           // covariance of the steady state
  MatrixXd K_half;      // K^{1/2}
  MatrixXd K_half_inv;  // K^{-1/2}
  double mu = 0.0;      // spectral gap of C
  bool defective = false;
  int M = 1;                    // largest Jordan block at the gap
  std::optional<int> m_HC;      // hypocoercivity index; nullopt = infinite
};

/// Evaluate the well-posedness condition without normalizing.
ConditionReport check_condition_a(const FpProblem& problem);

/// Spectral gap of an arbitrary square matrix (see SpectralGap).
SpectralGap spectral_gap(const Eigen::Ref<const MatrixXd>& C, double cluster_tol = 0.0);

/// Smallest m such that sum_{j=0}^{m} C_AS^j C_S (C_AS^T)^j is positive
/// definite, where C_S and C_AS are the symmetric and antisymmetric parts
/// of C. Returns nullopt when no m up to d-1 works (then none ever does).
std::optional<int> hypocoercivity_index(const Eigen::Ref<const MatrixXd>& C);

/// Same structural index computed from the original coordinates: smallest m
/// with sum_{j=0}^{m} C_tilde^j D_tilde (C_tilde^T)^j positive definite.
/// Agrees with hypocoercivity_index of the normalized drift.
std::optional<int> hypocoercivity_index_raw(const Eigen::Ref<const MatrixXd>& C_tilde,
                                            const Eigen::Ref<const MatrixXd>& D_tilde);

/// Normalize the problem: solve for the steady-state covariance K and form
/// the transformed drift. Throws condition_error when the well-posedness
/// condition fails.
NormalizedFp normalize(const FpProblem& problem);

/// The kinetic (underdamped) problem with spring constant a > 0:
/// drift [[0,-1],[a,1]] and diffusion diag(0,1).
FpProblem kinetic_problem(double a);

/// Normalized drift of the kinetic problem: [[0,-sqrt(a)],[sqrt(a),1]].
MatrixXd kinetic_normalized_drift(double a);

}  // namespace hypodecay
