#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hypodecay/errors.hpp"
#include "hypodecay/sym_tensor.hpp"

namespace hypodecay {

/// Evolution matrix of the order-m Hermite coefficient block: the
/// coefficients d^(m) satisfy d' = -Cm d, and the orthonormalized
/// coefficients d~ = diag(sqrt(alpha!)) d satisfy d~' = -Cm_normalized d~.
struct SubspaceGenerator {
  int d = 0;
  int m = 0;
  MatrixXd Cm;
  MatrixXd Cm_normalized;
};

/// Truncated Hermite expansion of a density relative to its equilibrium:
/// one orthonormalized coefficient vector per order m = 0..truncation.
/// Block 0 is the (conserved) total mass; the squared distance from
/// equilibrium is the plain sum of the squared block norms for m >= 1.
struct HermiteState {
  int d = 0;
  int truncation = 0;
  std::vector<VectorXd> blocks;  // blocks[m] has size binom(d+m-1, m)

  void check_shape() const;
};

/// Outcome of one verifier run.
struct VerifyReport {
  std::string check;
  int m_worst = 0;
  double t_worst = 0.0;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Assemble the order-m coefficient evolution matrix from the drift C.
/// Throws resource_error when the block dimension exceeds the cap.
SubspaceGenerator build_generator(const Eigen::Ref<const MatrixXd>& C, int m,
                                  long long cap = 100000);

/// One block forward in time: expm(-Cm t) d0, or the orthonormalized
/// variant expm(-Cm_normalized t) d0 when `normalized` is set.
VectorXd evolve_block(const SubspaceGenerator& gen, const Eigen::Ref<const VectorXd>& d0,
                      double t, bool normalized = false);

/// Raw coefficient vector -> symmetric tensor with entries d_alpha / gamma_alpha.
SymTensor coeffs_to_tensor(const Eigen::Ref<const VectorXd>& dvec, int d, int m);

/// Inverse of coeffs_to_tensor (exact round-trip).
VectorXd tensor_to_coeffs(const SymTensor& T);

/// Evolve every block of a state; block 0 is untouched by construction.
HermiteState evolve_state(const Eigen::Ref<const MatrixXd>& C, const HermiteState& state0,
                          double t);

/// Distance from equilibrium: sqrt(sum_{m>=1} |blocks[m]|^2).
double deviation_norm(const HermiteState& state);

/// Weighted-H1 seminorm in coefficient space: sqrt(sum_{m>=1} m |blocks[m]|^2).
double gradient_seminorm(const HermiteState& state);

/// Default truncation order used by the command-line tools.
int default_truncation(int d);

/// Check the blockwise propagator-norm identity
/// ||expm(-Cm_normalized t)|| = h(t)^m for m = 1..m_max over the grid,
/// with h(t) = ||expm(-C t)||. A nonzero `perturb` shifts each block
/// generator by perturb*I — a negative control that must fail.
VerifyReport verify_main_theorem(const Eigen::Ref<const MatrixXd>& C, int m_max,
                                 const Eigen::Ref<const VectorXd>& grid,
                                 double tol = 1e-8, double perturb = 0.0);

/// Check that random weighted sums of m-th powers evolve factor-wise —
/// blockwise evolution agrees with applying expm(-C t) inside each power —
/// and that the time derivative at t = 0 equals -m Sym(C (.) D) (central
/// differences, step 1e-5). Returns the trajectory report and the
/// derivative report, in that order.
std::vector<VerifyReport> verify_rank1_evolution(const Eigen::Ref<const MatrixXd>& C,
                                                 int m, int trials,
                                                 std::uint64_t seed = 12345,
                                                 double tol = 1e-9,
                                                 double fd_tol = 1e-6);

/// Plotting helper: evaluate the reconstructed relative deviation
/// sum_alpha d~_alpha He_alpha(x) / sqrt(alpha!) at the given points
/// (rows of X), using probabilists' Hermite polynomials.
VectorXd hermite_eval(const HermiteState& state, const Eigen::Ref<const MatrixXd>& X);

}  // namespace hypodecay
