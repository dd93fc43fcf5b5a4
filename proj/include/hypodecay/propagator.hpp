#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>

#include "hypodecay/errors.hpp"
#include "hypodecay/fp_problem.hpp"

namespace hypodecay {

/// Sampled propagator-norm curve h(t) = ||exp(-C t)||.
struct NormCurve {
  VectorXd times;
  VectorXd values;
  std::string method;  // how the values were produced
  double tol = 0.0;    // nominal accuracy of the values
};

/// Sharp-decay-constant report: the smallest c with
/// h(t) <= c * exp(-(mu - epsilon) t) for all t >= 0.
struct ConstantReport {
  double mu = 0.0;
  double c_numeric = 1.0;  // always >= 1
  double t_argmax = 0.0;   // where the supremum is (numerically) attained
  double epsilon = 0.0;    // rate reduction; 0 on the non-defective path
  std::optional<double> closed_form;  // analytic value when a formula applies
  std::string case_tag;  // coercive | nd_case1 | nd_case2 | nd_case3 | defective | general_d
  bool attained_at_infinity = false;  // supremum approached at the time horizon
};

/// Least-squares fit of the short-time law 1 - h(t) ~ c * t^alpha.
struct ShortTimeFit {
  double alpha_fit = 0.0;
  double c_fit = 0.0;
  int points_used = 0;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// One evaluation of the regularization envelope
/// G(t)^2 = max_{m >= 1} m * h(t)^{2m}.
struct EnvelopeValue {
  double g_squared = 0.0;
  double m_star = 0.0;          // real-valued interior maximizer
  long long m_argmax = 1;       // integer maximizer actually used
  bool truncated = false;       // the cap cut off the true maximizer
};

/// Evaluate h(t) = ||exp(-C t)|| on the given times (parallelized).
NormCurve h_curve(const Eigen::Ref<const MatrixXd>& C,
                  const Eigen::Ref<const VectorXd>& times);

/// Exact propagator norm of the kinetic problem with parameter a > 0 at
/// time t >= 0 (closed form, piecewise in a).
double kinetic_fp_closed_form(double a, double t);

/// Sharp constant by direct maximization of exp((mu - epsilon) t) h(t).
/// Non-defective drifts default to epsilon = 0; defective drifts default to
/// epsilon = mu / 100 and reject epsilon = 0 (the supremum is infinite).
ConstantReport best_constant_numeric(const Eigen::Ref<const MatrixXd>& C,
                                     std::optional<double> epsilon = std::nullopt);

/// Sharp constant for a positive stable, non-defective 2x2 drift from the
/// eigenvector geometry, cross-checked against the numeric supremum. The
/// spectrally degenerate third case falls back to the numeric value.
ConstantReport best_constant_2x2(const Eigen::Ref<const MatrixXd>& C);

/// Fit log(1 - h) vs log t over the window [t_lo, t_hi] of an existing
/// curve; points with no resolvable decay signal are discarded.
ShortTimeFit short_time_fit(const NormCurve& curve, double t_lo, double t_hi);

/// Regularization envelope at one time. M_cap <= 0 selects an automatic
/// cap (4x the interior maximizer, at most 1e6); an explicit positive cap
/// is used as given. `truncated` reports when the cap bit.
EnvelopeValue regularization_envelope(const Eigen::Ref<const MatrixXd>& C, double t,
                                      long long M_cap = 0);

/// n logarithmically spaced points on [lo, hi] (inclusive); lo > 0.
VectorXd log_grid(double lo, double hi, int n);

/// n linearly spaced points on [lo, hi] (inclusive).
VectorXd linear_grid(double lo, double hi, int n);

}  // namespace hypodecay
