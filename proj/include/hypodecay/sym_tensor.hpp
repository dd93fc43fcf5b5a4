#pragma once

#include <vector>

#include <Eigen/Core>

#include "hypodecay/errors.hpp"
#include "hypodecay/multi_index.hpp"

namespace hypodecay {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Symmetric m-tensor on R^d stored by entry class: one value per
/// multi-index of order m, listed in the canonical (grevlex) enumeration.
/// The value for class alpha is the common tensor entry A_{i_1...i_m} over
/// every tuple whose histogram is alpha.
struct SymTensor {
  int d = 0;
  int m = 0;
  VectorXd values;  // size binom(d+m-1, m)

  SymTensor() = default;
  SymTensor(int d_, int m_);

  void check_shape() const;
};

/// Frobenius inner product of two symmetric tensors, computed classwise:
/// <A, B> = sum_alpha gamma_alpha A_alpha B_alpha.
double frobenius_inner(const SymTensor& A, const SymTensor& B);
double frobenius_norm(const SymTensor& A);

/// v^(x)m: the rank-one symmetric tensor with entries prod_k v_{i_k}.
SymTensor outer_power(const VectorXd& v, int m);

/// Sum of weighted rank-one powers: sum_k coeffs[k] * vectors[k]^(x)m.
struct Rank1Sum {
  VectorXd coeffs;
  std::vector<VectorXd> vectors;
};

SymTensor to_sym_tensor(const Rank1Sum& r, int m);

/// Full multilinear action of the matrix B on all m slots:
/// (B (.) A)_{i_1...i_m} = sum_{j_1...j_m} B_{i_1 j_1}...B_{i_m j_m} A_{j_1...j_m}.
/// Symmetric in, symmetric out.
SymTensor multilinear_mult(const Eigen::Ref<const MatrixXd>& B, const SymTensor& A);

/// Dense (uncompressed) m-tensor with all d^m entries, first slot most
/// significant in the flat layout. Only for small cross-checks: the
/// constructor rejects d^m > 1e6.
struct DenseTensor {
  int d = 0;
  int m = 0;
  VectorXd flat;  // size d^m

  DenseTensor() = default;
  DenseTensor(int d_, int m_);

  double& at(const std::vector<int>& idx);
  double at(const std::vector<int>& idx) const;
};

/// Expand a classwise tensor to its full entry array.
DenseTensor materialize(const SymTensor& A);

/// Contract the matrix B into the first k slots of a dense tensor:
/// (B (.)^k A)_{i_1...i_m} =
///   sum_{j_1...j_k} B_{i_1 j_1}...B_{i_k j_k} A_{j_1...j_k i_{k+1}...i_m}.
DenseTensor multilinear_mult(const Eigen::Ref<const MatrixXd>& B, const DenseTensor& A,
                             int k);

/// Average over all slot permutations, returned classwise (the mean of the
/// entries within each class equals the symmetrized tensor's class value).
SymTensor symmetrize(const DenseTensor& A);

/// Plain entrywise Frobenius inner product of dense tensors.
double dense_frobenius_inner(const DenseTensor& A, const DenseTensor& B);

/// Elementary outer product v_1 (x) v_2 (x) ... (x) v_m as a dense tensor.
DenseTensor outer_product(const std::vector<VectorXd>& vs);

}  // namespace hypodecay
