#include "hypodecay/hermite_subspace.hpp"

#include <algorithm>
#include <cmath>

#include "hypodecay/matrix_ops.hpp"
#include "hypodecay/parallel.hpp"
#include "hypodecay/rng.hpp"

namespace hypodecay {

void HermiteState::check_shape() const {
  if (d < 1 || truncation < 0)
    throw invalid_input_error("state needs d >= 1 and truncation >= 0");
  if (blocks.size() != static_cast<std::size_t>(truncation) + 1)
    throw invalid_input_error("state must carry one block per order 0..truncation");
  for (int m = 0; m <= truncation; ++m)
    if (blocks[static_cast<std::size_t>(m)].size() !=
        static_cast<Eigen::Index>(num_multiindices(d, m)))
      throw invalid_input_error("state block size does not match its order");
}

SubspaceGenerator build_generator(const Eigen::Ref<const MatrixXd>& C, int m,
                                  long long cap) {
  if (C.rows() != C.cols() || C.rows() < 1)
    throw invalid_input_error("drift matrix must be square and non-empty");
  if (m < 0) throw invalid_input_error("block order must be non-negative");
  const int d = static_cast<int>(C.rows());
  const std::uint64_t size = num_multiindices(d, m);
  if (cap > 0 && size > static_cast<std::uint64_t>(cap))
    throw resource_error("coefficient block dimension exceeds the cap");

  const MultiIndexMap map(d, m);
  const auto G = static_cast<Eigen::Index>(map.size());
  SubspaceGenerator gen;
  gen.d = d;
  gen.m = m;
  gen.Cm = MatrixXd::Zero(G, G);
  for (Eigen::Index row = 0; row < G; ++row) {
    const MultiIndex& alpha = map.indices()[static_cast<std::size_t>(row)];
    for (int j = 0; j < d; ++j) {
      if (alpha[static_cast<std::size_t>(j)] < 1) continue;
      for (int l = 0; l < d; ++l) {
        MultiIndex beta = alpha;
        --beta[static_cast<std::size_t>(j)];
        ++beta[static_cast<std::size_t>(l)];
        gen.Cm(row, map.position(beta)) +=
            static_cast<double>(beta[static_cast<std::size_t>(l)]) * C(j, l);
      }
    }
  }

  VectorXd s(G);
  for (Eigen::Index i = 0; i < G; ++i)
    s(i) = std::sqrt(
        static_cast<double>(factorial_multi(map.indices()[static_cast<std::size_t>(i)])));
  gen.Cm_normalized = s.asDiagonal() * gen.Cm * s.cwiseInverse().asDiagonal();
  return gen;
}

VectorXd evolve_block(const SubspaceGenerator& gen, const Eigen::Ref<const VectorXd>& d0,
                      double t, bool normalized) {
  const MatrixXd& A = normalized ? gen.Cm_normalized : gen.Cm;
  if (d0.size() != A.rows())
    throw invalid_input_error("coefficient vector does not match the block dimension");
  return expm(-t * A) * d0;
}

SymTensor coeffs_to_tensor(const Eigen::Ref<const VectorXd>& dvec, int d, int m) {
  const MultiIndexMap map(d, m);
  if (dvec.size() != static_cast<Eigen::Index>(map.size()))
    throw invalid_input_error("coefficient vector length does not match (d, m)");
  SymTensor T(d, m);
  for (std::size_t i = 0; i < map.size(); ++i)
    T.values(static_cast<Eigen::Index>(i)) =
        dvec(static_cast<Eigen::Index>(i)) / static_cast<double>(gamma(map.indices()[i]));
  return T;
}

VectorXd tensor_to_coeffs(const SymTensor& T) {
  T.check_shape();
  const MultiIndexMap map(T.d, T.m);
  VectorXd dvec(static_cast<Eigen::Index>(map.size()));
  for (std::size_t i = 0; i < map.size(); ++i)
    dvec(static_cast<Eigen::Index>(i)) =
        T.values(static_cast<Eigen::Index>(i)) * static_cast<double>(gamma(map.indices()[i]));
  return dvec;
}

HermiteState evolve_state(const Eigen::Ref<const MatrixXd>& C, const HermiteState& state0,
                          double t) {
  state0.check_shape();
  if (C.rows() != state0.d || C.cols() != state0.d)
    throw invalid_input_error("drift matrix dimension does not match the state");
  HermiteState out = state0;
  const MatrixXd Cc = C;
  parallel_for(state0.truncation, [&](int i) {
    const int m = i + 1;  // block 0 is conserved mass: untouched
    const SubspaceGenerator gen = build_generator(Cc, m);
    out.blocks[static_cast<std::size_t>(m)] =
        evolve_block(gen, state0.blocks[static_cast<std::size_t>(m)], t,
                     /*normalized=*/true);
  });
  return out;
}

double deviation_norm(const HermiteState& state) {
  state.check_shape();
  double s = 0.0;
  for (int m = 1; m <= state.truncation; ++m)
    s += state.blocks[static_cast<std::size_t>(m)].squaredNorm();
  return std::sqrt(s);
}

double gradient_seminorm(const HermiteState& state) {
  state.check_shape();
  double s = 0.0;
  for (int m = 1; m <= state.truncation; ++m)
    s += static_cast<double>(m) * state.blocks[static_cast<std::size_t>(m)].squaredNorm();
  return std::sqrt(s);
}

int default_truncation(int d) {
  if (d <= 2) return 8;
  if (d == 3) return 5;
  return 4;
}

VerifyReport verify_main_theorem(const Eigen::Ref<const MatrixXd>& C, int m_max,
                                 const Eigen::Ref<const VectorXd>& grid, double tol,
                                 double perturb) {
  if (m_max < 1) throw invalid_input_error("need m_max >= 1");
  if (grid.size() < 1) throw invalid_input_error("need a non-empty time grid");
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    if (!(grid(i) >= 0.0)) throw invalid_input_error("grid times must be >= 0");

  VerifyReport report;
  report.check = "main_theorem";
  report.tolerance = tol;

  const auto n = grid.size();
  VectorXd h(n);
  const MatrixXd Cc = C;
  parallel_for(static_cast<int>(n),
               [&](int i) { h(i) = spectral_norm(expm(-grid(i) * Cc)); });

  // sup over blocks of the subspace norms, per time, to confirm the
  // full-propagator identity sup_m h^m = h at the end
  VectorXd sup_blocks = VectorXd::Zero(n);

  for (int m = 1; m <= m_max; ++m) {
    const SubspaceGenerator gen = build_generator(C, m);
    const MatrixXd Am =
        gen.Cm_normalized + perturb * MatrixXd::Identity(gen.Cm.rows(), gen.Cm.cols());
    VectorXd block_norm(n);
    parallel_for(static_cast<int>(n),
                 [&](int i) { block_norm(i) = spectral_norm(expm(-grid(i) * Am)); });
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dev = std::abs(block_norm(i) - std::pow(h(i), m));
      sup_blocks(i) = std::max(sup_blocks(i), block_norm(i));
      if (dev > report.deviation) {
        report.deviation = dev;
        report.m_worst = m;
        report.t_worst = grid(i);
      }
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    const double dev = std::abs(sup_blocks(i) - h(i));
    if (dev > report.deviation) {
      report.deviation = dev;
      report.m_worst = 1;
      report.t_worst = grid(i);
    }
  }

  report.pass = report.deviation <= tol;
  return report;
}

namespace {

SymTensor exact_rank1_at(const Rank1Sum& data, int m, const MatrixXd& C, double t) {
  const MatrixXd E = expm(-t * C);
  Rank1Sum moved;
  moved.coeffs = data.coeffs;
  moved.vectors.reserve(data.vectors.size());
  for (const auto& v : data.vectors) moved.vectors.push_back(E * v);
  return to_sym_tensor(moved, m);
}

}  // namespace

std::vector<VerifyReport> verify_rank1_evolution(const Eigen::Ref<const MatrixXd>& C,
                                                 int m, int trials, std::uint64_t seed,
                                                 double tol, double fd_tol) {
  if (C.rows() != C.cols() || C.rows() < 1)
    throw invalid_input_error("drift matrix must be square and non-empty");
  if (m < 1) throw invalid_input_error("need block order m >= 1");
  if (trials < 1) throw invalid_input_error("need at least one trial");

  const int d = static_cast<int>(C.rows());
  const SubspaceGenerator gen = build_generator(C, m);
  Rng rng(seed);

  VerifyReport traj;
  traj.check = "rank1_evolution";
  traj.m_worst = m;
  traj.tolerance = tol;

  VerifyReport deriv;
  deriv.check = "rank1_derivative";
  deriv.m_worst = m;
  deriv.tolerance = fd_tol;

  const double fd_step = 1e-5;
  for (int trial = 0; trial < trials; ++trial) {
    const int s = 1 + rng.uniform_int(0, 2);
    Rank1Sum data;
    data.coeffs = rng.normal_vector(s);
    for (int k = 0; k < s; ++k) {
      VectorXd v = rng.normal_vector(d);
      data.vectors.push_back(v / v.norm());
    }

    const SymTensor D0 = to_sym_tensor(data, m);
    const VectorXd d0 = tensor_to_coeffs(D0);

    const double ts[] = {0.25, 1.0, rng.uniform(0.0, 2.0)};
    for (double t : ts) {
      const SymTensor via_block = coeffs_to_tensor(evolve_block(gen, d0, t), d, m);
      const SymTensor exact = exact_rank1_at(data, m, C, t);
      const double dev = (via_block.values - exact.values).cwiseAbs().maxCoeff();
      if (dev > traj.deviation) {
        traj.deviation = dev;
        traj.t_worst = t;
      }
    }

    // central difference of the exact path at t = 0 against -m Sym(C (.) D)
    const SymTensor fwd = exact_rank1_at(data, m, C, fd_step);
    const SymTensor bwd = exact_rank1_at(data, m, C, -fd_step);
    const VectorXd fd = (fwd.values - bwd.values) / (2.0 * fd_step);
    const SymTensor rhs = symmetrize(multilinear_mult(C, materialize(D0), 1));
    const VectorXd analytic = -static_cast<double>(m) * rhs.values;
    const double dev = (fd - analytic).cwiseAbs().maxCoeff();
    if (dev > deriv.deviation) {
      deriv.deviation = dev;
      deriv.t_worst = 0.0;
    }
  }

  traj.pass = traj.deviation <= tol;
  deriv.pass = deriv.deviation <= fd_tol;
  return {traj, deriv};
}

namespace {

// He_0, He_1, ..., He_n at x (probabilists' convention).
std::vector<double> hermite_values(int n, double x) {
  std::vector<double> he(static_cast<std::size_t>(n) + 1);
  he[0] = 1.0;
  if (n >= 1) he[1] = x;
  for (int k = 1; k < n; ++k)
    he[static_cast<std::size_t>(k) + 1] =
        x * he[static_cast<std::size_t>(k)] -
        static_cast<double>(k) * he[static_cast<std::size_t>(k) - 1];
  return he;
}

}  // namespace

VectorXd hermite_eval(const HermiteState& state, const Eigen::Ref<const MatrixXd>& X) {
  state.check_shape();
  if (X.cols() != state.d)
    throw invalid_input_error("evaluation points must have one column per coordinate");
  VectorXd out = VectorXd::Zero(X.rows());
  for (Eigen::Index p = 0; p < X.rows(); ++p) {
    std::vector<std::vector<double>> he(static_cast<std::size_t>(state.d));
    for (int i = 0; i < state.d; ++i)
      he[static_cast<std::size_t>(i)] = hermite_values(state.truncation, X(p, i));
    double total = 0.0;
    for (int m = 0; m <= state.truncation; ++m) {
      const MultiIndexMap map(state.d, m);
      for (std::size_t a = 0; a < map.size(); ++a) {
        const MultiIndex& alpha = map.indices()[a];
        double basis = 1.0;
        for (int i = 0; i < state.d; ++i)
          basis *= he[static_cast<std::size_t>(i)]
                     [static_cast<std::size_t>(alpha[static_cast<std::size_t>(i)])];
        basis /= std::sqrt(static_cast<double>(factorial_multi(alpha)));
        total += state.blocks[static_cast<std::size_t>(m)](static_cast<Eigen::Index>(a)) *
                 basis;
      }
    }
    out(p) = total;
  }
  return out;
}

}  // namespace hypodecay
