#include "hypodecay/matrix_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace hypodecay {

namespace {

void require_finite(const Eigen::Ref<const MatrixXd>& A, const char* op) {
  if (!A.allFinite())
    throw invalid_input_error(std::string(op) + ": matrix has non-finite entries");
}

void require_square(const Eigen::Ref<const MatrixXd>& A, const char* op) {
  if (A.rows() != A.cols())
    throw invalid_input_error(std::string(op) + ": matrix must be square");
}

// Symmetry check scaled by the matrix magnitude.
void require_symmetric(const Eigen::Ref<const MatrixXd>& A, double tol, const char* op) {
  require_square(A, op);
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol * scale)
    throw invalid_input_error(std::string(op) + ": matrix is asymmetric beyond tolerance");
}

double min_symmetric_eigenvalue(const Eigen::Ref<const MatrixXd>& A) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (A + A.transpose()),
                                             Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw numerical_error("symmetric eigensolver failed to converge");
  return es.eigenvalues().minCoeff();
}

}  // namespace

double default_cluster_tol(const Eigen::Ref<const MatrixXd>& A) {
  return 1e-7 * (1.0 + spectral_norm(A));
}

double spectral_norm(const Eigen::Ref<const MatrixXd>& A) {
  require_finite(A, "spectral_norm");
  if (A.size() == 0) return 0.0;
  if (A.isZero(0.0)) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(A);
  return svd.singularValues()(0);
}

namespace {

// Pade numerator coefficients for the diagonal [m/m] approximants of e^x.
constexpr double kB3[] = {120.0, 60.0, 12.0, 1.0};
constexpr double kB5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr double kB7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                          25200.0,    1512.0,    56.0,      1.0};
constexpr double kB9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                          30270240.0,    2162160.0,    110880.0,     3960.0,
                          90.0,          1.0};
constexpr double kB13[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                           1187353796428800.0,  129060195264000.0,   10559470521600.0,
                           670442572800.0,      33522128640.0,       1323241920.0,
                           40840800.0,          960960.0,            16380.0,
                           182.0,               1.0};

// theta_m bounds from Higham, "The scaling and squaring method for the matrix
// exponential revisited" (2005), Table 2.3.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

MatrixXd pade_solve(const MatrixXd& U, const MatrixXd& V) {
  return Eigen::PartialPivLU<MatrixXd>(V - U).solve(V + U);
}

template <size_t N>
MatrixXd pade_low_order(const MatrixXd& A, const double (&b)[N]) {
  const auto n = A.rows();
  const MatrixXd I = MatrixXd::Identity(n, n);
  const MatrixXd A2 = A * A;
  MatrixXd even = b[0] * I;
  MatrixXd odd = b[1] * I;
  MatrixXd power = I;  // A^(2k)
  for (size_t k = 1; 2 * k < N; ++k) {
    power = power * A2;
    even += b[2 * k] * power;
    if (2 * k + 1 < N) odd += b[2 * k + 1] * power;
  }
  return pade_solve(A * odd, even);
}

MatrixXd pade13(const MatrixXd& A) {
  const auto n = A.rows();
  const double* b = kB13;
  const MatrixXd I = MatrixXd::Identity(n, n);
  const MatrixXd A2 = A * A;
  const MatrixXd A4 = A2 * A2;
  const MatrixXd A6 = A2 * A4;
  const MatrixXd U =
      A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 +
           b[3] * A2 + b[1] * I);
  const MatrixXd V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 +
                     b[4] * A4 + b[2] * A2 + b[0] * I;
  return pade_solve(U, V);
}

}  // namespace

MatrixXd expm(const Eigen::Ref<const MatrixXd>& A) {
  require_finite(A, "expm");
  require_square(A, "expm");
  const double eta = A.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
  if (eta <= kTheta3) return pade_low_order(A, kB3);
  if (eta <= kTheta5) return pade_low_order(A, kB5);
  if (eta <= kTheta7) return pade_low_order(A, kB7);
  if (eta <= kTheta9) return pade_low_order(A, kB9);
  int squarings = 0;
  MatrixXd scaled = A;
  if (eta > kTheta13) {
    squarings = static_cast<int>(std::ceil(std::log2(eta / kTheta13)));
    scaled = A / std::exp2(squarings);
  }
  MatrixXd E = pade13(scaled);
  for (int s = 0; s < squarings; ++s) E = E * E;
  return E;
}

MatrixXd solve_lyapunov(const Eigen::Ref<const MatrixXd>& C,
                        const Eigen::Ref<const MatrixXd>& D,
                        double rtol) {
  require_finite(C, "solve_lyapunov");
  require_finite(D, "solve_lyapunov");
  require_square(C, "solve_lyapunov");
  if (D.rows() != C.rows() || D.cols() != C.cols())
    throw invalid_input_error("solve_lyapunov: size mismatch between drift and diffusion");
  require_symmetric(D, 1e-9, "solve_lyapunov");

  const auto d = C.rows();
  {
    Eigen::EigenSolver<MatrixXd> es(C, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
      throw numerical_error("solve_lyapunov: eigensolver failed on the drift matrix");
    if (es.eigenvalues().real().minCoeff() <= 0.0)
      throw condition_error(
          "solve_lyapunov: drift matrix is not positive stable, no unique solution");
  }

  // vec(C X + X C^T) = (I (x) C + C (x) I) vec X  for column-major vec.
  const auto n = d * d;
  MatrixXd M = MatrixXd::Zero(n, n);
  const MatrixXd I = MatrixXd::Identity(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      M.block(i * d, j * d, d, d) += I(i, j) * C;  // I (x) C
      M.block(i * d, j * d, d, d) += C(i, j) * I;  // C (x) I
    }

  Eigen::FullPivLU<MatrixXd> lu(M);
  if (!lu.isInvertible())
    throw numerical_error("solve_lyapunov: Kronecker system is numerically singular");
  const VectorXd rhs = 2.0 * Eigen::Map<const VectorXd>(D.data(), n);
  const VectorXd x = lu.solve(rhs);
  MatrixXd K = Eigen::Map<const MatrixXd>(x.data(), d, d);
  K = 0.5 * (K + K.transpose()).eval();

  const double residual = (C * K + K * C.transpose() - 2.0 * D).cwiseAbs().maxCoeff();
  if (residual > rtol * (1.0 + spectral_norm(D)))
    throw numerical_error("solve_lyapunov: residual beyond tolerance, system ill-conditioned");
  return K;
}

int rank_with_tol(const Eigen::Ref<const Eigen::MatrixXcd>& A, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++r;
  return r;
}

EigenData eigen_analyze(const Eigen::Ref<const MatrixXd>& A, double cluster_tol) {
  require_finite(A, "eigen_analyze");
  require_square(A, "eigen_analyze");
  const auto d = A.rows();
  const double tol = cluster_tol > 0.0 ? cluster_tol : default_cluster_tol(A);

  Eigen::EigenSolver<MatrixXd> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw numerical_error("eigen_analyze: QR iteration failed to converge");
  std::vector<std::complex<double>> lam(es.eigenvalues().data(),
                                        es.eigenvalues().data() + d);
  std::sort(lam.begin(), lam.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  EigenData out;
  out.cluster_tol = tol;
  size_t i = 0;
  while (i < lam.size()) {
    size_t j = i + 1;
    std::complex<double> sum = lam[i];
    while (j < lam.size() && std::abs(lam[j] - lam[j - 1]) <= tol) {
      sum += lam[j];
      ++j;
    }
    const int count = static_cast<int>(j - i);
    const std::complex<double> rep = sum / static_cast<double>(count);
    const Eigen::MatrixXcd shifted =
        A.cast<std::complex<double>>() - rep * Eigen::MatrixXcd::Identity(d, d);
    const int geo = static_cast<int>(d) - rank_with_tol(shifted, tol);
    out.eigenvalues.push_back(rep);
    out.algebraic.push_back(count);
    out.geometric.push_back(std::max(1, std::min(geo, count)));
    i = j;
  }
  return out;
}

bool is_positive_definite(const Eigen::Ref<const MatrixXd>& A, double tol) {
  require_finite(A, "is_positive_definite");
  require_symmetric(A, 1e-9, "is_positive_definite");
  const double scale = std::max(1.0, spectral_norm(A));
  return min_symmetric_eigenvalue(A) > tol * scale;
}

bool is_positive_semidefinite(const Eigen::Ref<const MatrixXd>& A, double tol) {
  require_finite(A, "is_positive_semidefinite");
  require_symmetric(A, 1e-9, "is_positive_semidefinite");
  const double scale = std::max(1.0, spectral_norm(A));
  return min_symmetric_eigenvalue(A) >= -tol * scale;
}

namespace {

MatrixXd spd_power(const Eigen::Ref<const MatrixXd>& K, double exponent, double tol,
                   const char* op) {
  require_finite(K, op);
  require_symmetric(K, 1e-9, op);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (K + K.transpose()));
  if (es.info() != Eigen::Success)
    throw numerical_error(std::string(op) + ": eigensolver failed");
  const VectorXd ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() <= tol * scale)
    throw condition_error(std::string(op) + ": matrix is not positive definite");
  const VectorXd powered = ev.array().pow(exponent).matrix();
  return es.eigenvectors() * powered.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

MatrixXd spd_sqrt(const Eigen::Ref<const MatrixXd>& K, double tol) {
  return spd_power(K, 0.5, tol, "spd_sqrt");
}

MatrixXd spd_inv_sqrt(const Eigen::Ref<const MatrixXd>& K, double tol) {
  return spd_power(K, -0.5, tol, "spd_inv_sqrt");
}

MatrixXd psd_sqrt(const Eigen::Ref<const MatrixXd>& K, double tol) {
  require_finite(K, "psd_sqrt");
  require_symmetric(K, 1e-9, "psd_sqrt");
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (K + K.transpose()));
  if (es.info() != Eigen::Success)
    throw numerical_error("psd_sqrt: eigensolver failed");
  VectorXd ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol * scale)
      throw condition_error("psd_sqrt: matrix has a negative eigenvalue");
    ev(i) = ev(i) > 0.0 ? std::sqrt(ev(i)) : 0.0;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace hypodecay
