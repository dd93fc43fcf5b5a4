#include "hypodecay/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hypodecay/matrix_ops.hpp"
#include "hypodecay/parallel.hpp"

namespace hypodecay {

VectorXd log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1)
    throw invalid_input_error("log grid needs 0 < lo <= hi and n >= 1");
  VectorXd t(n);
  if (n == 1) {
    t(0) = lo;
    return t;
  }
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    t(i) = std::exp(llo + (lhi - llo) * static_cast<double>(i) / (n - 1));
  t(0) = lo;  // exp(log(lo)) can land one ulp off the requested endpoint
  t(n - 1) = hi;
  return t;
}

VectorXd linear_grid(double lo, double hi, int n) {
  if (!(hi >= lo) || n < 1)
    throw invalid_input_error("linear grid needs lo <= hi and n >= 1");
  VectorXd t(n);
  if (n == 1) {
    t(0) = lo;
    return t;
  }
  for (int i = 0; i < n; ++i)
    t(i) = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  t(n - 1) = hi;
  return t;
}

NormCurve h_curve(const Eigen::Ref<const MatrixXd>& C,
                  const Eigen::Ref<const VectorXd>& times) {
  if (C.rows() != C.cols() || C.rows() < 1)
    throw invalid_input_error("drift matrix must be square and non-empty");
  if (!C.allFinite() || !times.allFinite())
    throw invalid_input_error("h_curve needs finite inputs");
  NormCurve curve;
  curve.times = times;
  curve.values.resize(times.size());
  curve.method = "expm";
  curve.tol = 1e-12;
  const MatrixXd Cc = C;  // own the data before crossing threads
  parallel_for(static_cast<int>(times.size()), [&](int i) {
    curve.values(i) = spectral_norm(expm(-times(i) * Cc));
  });
  return curve;
}

double kinetic_fp_closed_form(double a, double t) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw invalid_input_error("kinetic closed form needs a finite a > 0");
  if (!(t >= 0.0) || !std::isfinite(t))
    throw invalid_input_error("kinetic closed form needs a finite t >= 0");

  double c;
  if (a < 0.25) {
    const double theta = std::sqrt(1.0 - 4.0 * a);
    const double r = std::tanh(0.5 * theta * t);  // (e^{theta t}-1)/(e^{theta t}+1)
    const double inv_t2 = 1.0 / (theta * theta);
    c = std::sqrt(std::exp(-2.0 * theta * t) +
                  (1.0 - theta * theta) * 0.5 * inv_t2 * std::pow(1.0 - std::exp(-theta * t), 2) +
                  0.5 * (1.0 - std::exp(-2.0 * theta * t)) *
                      (1.0 + std::sqrt(1.0 + (inv_t2 - 1.0) * r * r) / theta));
  } else if (a > 0.25) {
    const double omega = std::sqrt(4.0 * a - 1.0);
    const double E = 2.0 * std::abs(std::sin(0.5 * omega * t));  // |e^{i omega t} - 1|
    const double w2 = omega * omega;
    c = std::sqrt(1.0 + E / (2.0 * w2) * (E + std::sqrt(E * E + 4.0 * w2)));
  } else {
    c = std::sqrt(1.0 + 0.5 * t * t + t * std::sqrt(1.0 + 0.25 * t * t));
  }

  const double mu = 0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - 4.0 * a)));
  return c * std::exp(-mu * t);
}

namespace {

struct SupResult {
  double value = 1.0;
  double t_at = 0.0;
  bool at_infinity = false;
};

// Supremum of f(t) = exp(rate * t) * ||exp(-C t)|| over [0, T_max]:
// coarse log grid, then golden-section refinement around the best point.
// Works on log f so the exponential compensation cannot overflow when the
// horizon is long (deep defective tails).
SupResult sup_scaled_norm(const MatrixXd& C, double rate, double mu, double T_max) {
  const auto f = [&](double t) { return rate * t + std::log(spectral_norm(expm(-t * C))); };

  const int n = 2000;
  const VectorXd grid = log_grid(1e-3 / mu, T_max, n);
  std::vector<double> ts(static_cast<std::size_t>(n) + 1);
  std::vector<double> fs(ts.size());
  ts[0] = 0.0;
  for (int i = 0; i < n; ++i) ts[static_cast<std::size_t>(i) + 1] = grid(i);
  parallel_for(static_cast<int>(ts.size()),
               [&](int i) { fs[static_cast<std::size_t>(i)] = f(ts[static_cast<std::size_t>(i)]); });

  std::size_t best = 0;
  for (std::size_t i = 1; i < fs.size(); ++i)
    if (fs[i] > fs[best]) best = i;

  SupResult out;
  if (best + 1 == fs.size() && fs[best] > fs[best - 1]) {
    // still rising at the horizon: the supremum sits at (or beyond) T_max
    out.value = std::exp(fs[best]);
    out.t_at = ts[best];
    out.at_infinity = true;
    return out;
  }

  double lo = ts[best == 0 ? 0 : best - 1];
  double hi = ts[std::min(best + 1, ts.size() - 1)];
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 120 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    }
  }
  const double tm = 0.5 * (lo + hi);
  const double fm = f(tm);
  const double lbest = std::max({fs[best], f1, f2, fm});
  out.value = std::exp(lbest);
  if (fm >= lbest)
    out.t_at = tm;
  else if (f1 >= lbest)
    out.t_at = x1;
  else if (f2 >= lbest)
    out.t_at = x2;
  else
    out.t_at = ts[best];
  return out;
}

// Time horizon that captures the supremum: long enough for the slowest
// transient (and the rate reduction) to die out and for one full rotation
// of any oscillatory eigen-pair at the gap.
double pick_horizon(const EigenData& ed, double mu, double eps) {
  double mu_next = 0.0;  // distance from mu to the next-slowest real part
  for (const auto& lam : ed.eigenvalues) {
    const double gapd = lam.real() - mu;
    if (gapd > 1e-9 * (1.0 + std::abs(mu)) && (mu_next == 0.0 || gapd < mu_next))
      mu_next = gapd;
  }
  double r = mu_next > 0.0 ? mu_next : mu;
  if (eps > 0.0) r = std::min(r, eps);
  double T = 50.0 / r;

  // smallest nonzero imaginary spread among gap eigenvalues
  double dmin = 0.0;
  for (std::size_t i = 0; i < ed.eigenvalues.size(); ++i) {
    if (ed.eigenvalues[i].real() > mu + ed.cluster_tol) continue;
    for (std::size_t j = i + 1; j < ed.eigenvalues.size(); ++j) {
      if (ed.eigenvalues[j].real() > mu + ed.cluster_tol) continue;
      const double di = std::abs(ed.eigenvalues[i].imag() - ed.eigenvalues[j].imag());
      if (di > 1e-9 && (dmin == 0.0 || di < dmin)) dmin = di;
    }
  }
  if (dmin > 0.0) T = std::max(T, 2.0 * 2.0 * M_PI / dmin);
  return T;
}

std::string spectral_case_tag_2x2(const EigenData& ed, double scale_tol) {
  // flatten clusters back to two eigenvalues
  std::vector<std::complex<double>> lam;
  for (std::size_t i = 0; i < ed.eigenvalues.size(); ++i)
    for (int k = 0; k < ed.algebraic[i]; ++k) lam.push_back(ed.eigenvalues[i]);
  if (std::abs(lam[0].real() - lam[1].real()) <= scale_tol) return "nd_case1";
  if (std::abs(lam[0].imag() - lam[1].imag()) <= scale_tol) return "nd_case2";
  return "nd_case3";
}

}  // namespace

ConstantReport best_constant_numeric(const Eigen::Ref<const MatrixXd>& C,
                                     std::optional<double> epsilon) {
  if (C.rows() != C.cols() || C.rows() < 1)
    throw invalid_input_error("drift matrix must be square and non-empty");
  if (!C.allFinite()) throw invalid_input_error("drift matrix must be finite");

  const SpectralGap gap = spectral_gap(C);
  if (!(gap.mu > 0.0))
    throw condition_error("drift matrix is not positive stable, no exponential decay");

  double eps = 0.0;
  if (epsilon.has_value()) {
    if (!(*epsilon >= 0.0) || !std::isfinite(*epsilon))
      throw invalid_input_error("rate reduction must be finite and non-negative");
    eps = *epsilon;
  } else if (gap.defective) {
    eps = gap.mu / 100.0;
  }
  if (gap.defective && eps == 0.0)
    throw condition_error(
        "defective drift: the constant is unbounded at the sharp rate; pass a "
        "positive rate reduction");

  const EigenData ed = eigen_analyze(C);
  const double T_max = pick_horizon(ed, gap.mu, eps);
  const SupResult sup = sup_scaled_norm(C, gap.mu - eps, gap.mu, T_max);

  ConstantReport report;
  report.mu = gap.mu;
  report.c_numeric = std::max(1.0, sup.value);
  report.t_argmax = sup.t_at;
  report.epsilon = eps;
  report.attained_at_infinity = sup.at_infinity;

  const double scale_tol = 1e-9 * (1.0 + spectral_norm(C));
  if (gap.defective) {
    report.case_tag = "defective";
  } else if ((C - C.transpose()).cwiseAbs().maxCoeff() <= scale_tol) {
    report.case_tag = "coercive";
  } else if (C.rows() == 2) {
    report.case_tag = spectral_case_tag_2x2(ed, scale_tol);
  } else {
    report.case_tag = "general_d";
  }
  return report;
}

ConstantReport best_constant_2x2(const Eigen::Ref<const MatrixXd>& C) {
  if (C.rows() != 2 || C.cols() != 2)
    throw invalid_input_error("closed-form constant is only available for 2x2 drifts");
  if (!C.allFinite()) throw invalid_input_error("drift matrix must be finite");

  const SpectralGap gap = spectral_gap(C);
  if (!(gap.mu > 0.0))
    throw condition_error("drift matrix is not positive stable, no exponential decay");
  if (gap.defective)
    throw condition_error(
        "defective drift has no sharp-rate constant; use the numeric path with a "
        "rate reduction");

  // Eigenvectors of C^T carry the geometry of the adapted norm.
  Eigen::EigenSolver<MatrixXd> es(C.transpose());
  if (es.info() != Eigen::Success)
    throw numerical_error("eigensolver failed on the transposed drift");
  Eigen::Vector2cd lam = es.eigenvalues();
  Eigen::Matrix2cd W = es.eigenvectors();
  if (lam(1).real() < lam(0).real() ||
      (lam(1).real() == lam(0).real() && lam(1).imag() < lam(0).imag())) {
    std::swap(lam(0), lam(1));
    W.col(0).swap(W.col(1));
  }

  const double alpha =
      std::abs(W.col(0).dot(W.col(1))) / (W.col(0).norm() * W.col(1).norm());
  const double scale_tol = 1e-9 * (1.0 + spectral_norm(C));

  ConstantReport report = best_constant_numeric(C, 0.0);
  if (std::abs(lam(0).real() - lam(1).real()) <= scale_tol) {
    if (alpha >= 1.0 - 1e-12)
      throw condition_error("eigenvector collapse: drift is numerically defective");
    report.closed_form = std::sqrt((1.0 + alpha) / (1.0 - alpha));
    report.case_tag = "nd_case1";
  } else if (std::abs(lam(0).imag() - lam(1).imag()) <= scale_tol) {
    if (alpha >= 1.0 - 1e-12)
      throw condition_error("eigenvector collapse: drift is numerically defective");
    report.closed_form = 1.0 / std::sqrt(1.0 - alpha * alpha);
    report.case_tag = "nd_case2";
  } else {
    report.case_tag = "nd_case3";  // no explicit formula; numeric value stands
  }
  return report;
}

ShortTimeFit short_time_fit(const NormCurve& curve, double t_lo, double t_hi) {
  if (curve.times.size() != curve.values.size())
    throw invalid_input_error("curve has mismatched time and value counts");
  if (!(t_lo > 0.0) || !(t_hi > t_lo))
    throw invalid_input_error("fit window needs 0 < t_lo < t_hi");

  const double floor_signal = 1e3 * std::numeric_limits<double>::epsilon();
  std::vector<double> xs, ys;
  for (Eigen::Index i = 0; i < curve.times.size(); ++i) {
    const double t = curve.times(i), h = curve.values(i);
    if (t < t_lo || t > t_hi) continue;
    const double drop = 1.0 - h;
    if (!(drop > floor_signal)) continue;  // below resolvable decay
    xs.push_back(std::log(t));
    ys.push_back(std::log(drop));
  }
  if (xs.size() < 2)
    throw invalid_input_error("insufficient signal in the fit window");

  const auto n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw numerical_error("degenerate fit window");

  ShortTimeFit fit;
  fit.alpha_fit = (n * sxy - sx * sy) / denom;
  fit.c_fit = std::exp((sy - fit.alpha_fit * sx) / n);
  fit.points_used = static_cast<int>(xs.size());
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  return fit;
}

EnvelopeValue regularization_envelope(const Eigen::Ref<const MatrixXd>& C, double t,
                                      long long M_cap) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw invalid_input_error("envelope needs a finite t > 0");
  const double h = spectral_norm(expm(-t * C));
  if (!(h < 1.0))
    throw condition_error("propagator does not contract at this time, envelope diverges");

  const double lq = 2.0 * std::log(h);  // log h^2 < 0
  EnvelopeValue out;
  out.m_star = -1.0 / lq;

  long long cap = M_cap;
  if (cap <= 0)
    cap = static_cast<long long>(
        std::min(1e6, std::ceil(4.0 * std::max(out.m_star, 1.0))));
  out.truncated = out.m_star > static_cast<double>(cap);

  const auto clamp_m = [&](double m) {
    return std::max(1LL, std::min(cap, static_cast<long long>(m)));
  };
  const long long lo = clamp_m(std::floor(out.m_star));
  const long long hi = clamp_m(std::ceil(out.m_star));
  const auto g = [&](long long m) {
    return std::exp(std::log(static_cast<double>(m)) + static_cast<double>(m) * lq);
  };
  out.m_argmax = lo;
  out.g_squared = g(lo);
  if (hi != lo && g(hi) > out.g_squared) {
    out.m_argmax = hi;
    out.g_squared = g(hi);
  }
  return out;
}

}  // namespace hypodecay
