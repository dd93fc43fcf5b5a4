#include "hypodecay/fp_problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace hypodecay {

void FpProblem::validate(double sym_tol) const {
  if (C_tilde.rows() < 1 || C_tilde.rows() != C_tilde.cols())
    throw invalid_input_error("drift matrix must be square and non-empty");
  if (D_tilde.rows() != C_tilde.rows() || D_tilde.cols() != C_tilde.cols())
    throw invalid_input_error("diffusion matrix size must match the drift matrix");
  if (!C_tilde.allFinite() || !D_tilde.allFinite())
    throw invalid_input_error("problem matrices must be finite");
  const double scale = std::max(1.0, D_tilde.cwiseAbs().maxCoeff());
  if ((D_tilde - D_tilde.transpose()).cwiseAbs().maxCoeff() > sym_tol * scale)
    throw invalid_input_error("diffusion matrix must be symmetric");
}

namespace {

// Rank of the controllability-style block matrix [B, C B, ..., C^{d-1} B].
bool krylov_full_rank(const MatrixXd& C, const MatrixXd& B) {
  const auto d = C.rows();
  MatrixXd blocks(d, d * d);
  MatrixXd power = B;
  for (Eigen::Index j = 0; j < d; ++j) {
    blocks.middleCols(j * d, d) = power;
    power = C * power;
  }
  const double tol = 1e-10 * std::max(1.0, spectral_norm(blocks));
  return rank_with_tol(blocks.cast<std::complex<double>>(), tol) == d;
}

std::optional<int> index_from_terms(const MatrixXd& C, const MatrixXd& D) {
  const int d = static_cast<int>(C.rows());
  MatrixXd term = D;          // C^j D (C^T)^j
  MatrixXd total = MatrixXd::Zero(d, d);
  for (int m = 0; m < d; ++m) {
    if (m > 0) term = C * term * C.transpose();
    total += term;
    if (is_positive_definite(0.5 * (total + total.transpose()))) return m;
  }
  return std::nullopt;
}

}  // namespace

ConditionReport check_condition_a(const FpProblem& problem) {
  problem.validate();
  ConditionReport report;
  std::ostringstream details;

  report.cs_psd = is_positive_semidefinite(0.5 * (problem.D_tilde + problem.D_tilde.transpose()));
  details << (report.cs_psd ? "diffusion is positive semidefinite"
                            : "diffusion has a negative eigenvalue");

  if (report.cs_psd) {
    const MatrixXd B = psd_sqrt(0.5 * (problem.D_tilde + problem.D_tilde.transpose()));
    report.kawashima_ok = krylov_full_rank(problem.C_tilde, B);
  } else {
    report.kawashima_ok = false;
  }
  details << "; "
          << (report.kawashima_ok ? "drift-diffusion rank condition holds"
                                  : "rank condition fails: some direction never diffuses");

  Eigen::EigenSolver<MatrixXd> es(problem.C_tilde, false);
  if (es.info() != Eigen::Success)
    throw numerical_error("check_condition_a: eigensolver failed on the drift matrix");
  report.positive_stable = es.eigenvalues().real().minCoeff() > 0.0;
  details << "; "
          << (report.positive_stable ? "drift is positively stable"
                                     : "drift has an eigenvalue with non-positive real part");

  report.details = details.str();
  return report;
}

SpectralGap spectral_gap(const Eigen::Ref<const MatrixXd>& C, double cluster_tol) {
  const EigenData ed = eigen_analyze(C, cluster_tol);
  SpectralGap gap;
  gap.mu = ed.eigenvalues.front().real();
  for (const auto& lam : ed.eigenvalues) gap.mu = std::min(gap.mu, lam.real());

  const auto d = C.rows();
  gap.M = 1;
  gap.defective = false;
  for (std::size_t i = 0; i < ed.eigenvalues.size(); ++i) {
    if (ed.eigenvalues[i].real() > gap.mu + ed.cluster_tol) continue;
    if (ed.geometric[i] == ed.algebraic[i]) continue;
    gap.defective = true;
    // Largest Jordan block: grow (C - lambda I)^k until the nullity stalls.
    const Eigen::MatrixXcd shifted =
        C.cast<std::complex<double>>() -
        ed.eigenvalues[i] * Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd power = shifted;
    int prev_null = 0;
    for (int k = 1; k <= ed.algebraic[i]; ++k) {
      const int null_k = static_cast<int>(d) - rank_with_tol(power, ed.cluster_tol);
      if (null_k == prev_null) break;
      gap.M = std::max(gap.M, k);
      prev_null = null_k;
      power = power * shifted;
    }
  }
  return gap;
}

std::optional<int> hypocoercivity_index(const Eigen::Ref<const MatrixXd>& C) {
  if (C.rows() != C.cols()) throw invalid_input_error("drift matrix must be square");
  const MatrixXd Cs = 0.5 * (C + C.transpose());
  const MatrixXd Cas = 0.5 * (C - C.transpose());
  if (!is_positive_semidefinite(Cs))
    throw condition_error("hypocoercivity index needs a positive semidefinite symmetric part");
  return index_from_terms(Cas, Cs);
}

std::optional<int> hypocoercivity_index_raw(const Eigen::Ref<const MatrixXd>& C_tilde,
                                            const Eigen::Ref<const MatrixXd>& D_tilde) {
  if (C_tilde.rows() != C_tilde.cols())
    throw invalid_input_error("drift matrix must be square");
  if (D_tilde.rows() != C_tilde.rows() || D_tilde.cols() != C_tilde.cols())
    throw invalid_input_error("diffusion matrix size must match the drift matrix");
  const MatrixXd D = 0.5 * (D_tilde + D_tilde.transpose());
  if (!is_positive_semidefinite(D))
    throw condition_error("hypocoercivity index needs a positive semidefinite diffusion");
  return index_from_terms(C_tilde, D);
}

NormalizedFp normalize(const FpProblem& problem) {
  problem.validate();
  const ConditionReport report = check_condition_a(problem);
  if (!report.all())
    throw condition_error("problem is not well posed: " + report.details);

  NormalizedFp out;
  out.d = problem.dim();
  out.K = solve_lyapunov(problem.C_tilde, 0.5 * (problem.D_tilde + problem.D_tilde.transpose()));
  if (!is_positive_definite(out.K))
    throw condition_error("steady-state covariance is not positive definite");
  out.K_half = spd_sqrt(out.K);
  out.K_half_inv = spd_inv_sqrt(out.K);
  out.C = out.K_half_inv * problem.C_tilde * out.K_half;

  const SpectralGap gap = spectral_gap(out.C);
  out.mu = gap.mu;
  out.defective = gap.defective;
  out.M = gap.M;
  out.m_HC = hypocoercivity_index(out.C);
  return out;
}

FpProblem kinetic_problem(double a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw invalid_input_error("kinetic problem needs a finite a > 0");
  FpProblem p;
  p.C_tilde.resize(2, 2);
  p.C_tilde << 0, -1, a, 1;
  p.D_tilde = Eigen::Vector2d(0.0, 1.0).asDiagonal();
  std::ostringstream label;
  label << "kinetic a=" << a;
  p.label = label.str();
  return p;
}

MatrixXd kinetic_normalized_drift(double a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw invalid_input_error("kinetic drift needs a finite a > 0");
  MatrixXd C(2, 2);
  const double s = std::sqrt(a);
  C << 0, -s, s, 1;
  return C;
}

}  // namespace hypodecay
