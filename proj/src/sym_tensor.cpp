#include "hypodecay/sym_tensor.hpp"

#include <cmath>

namespace hypodecay {

SymTensor::SymTensor(int d_, int m_) : d(d_), m(m_) {
  if (d < 1 || m < 0) throw invalid_input_error("tensor needs d >= 1 and m >= 0");
  values = VectorXd::Zero(static_cast<Eigen::Index>(num_multiindices(d, m)));
}

void SymTensor::check_shape() const {
  if (d < 1 || m < 0) throw invalid_input_error("tensor needs d >= 1 and m >= 0");
  if (values.size() != static_cast<Eigen::Index>(num_multiindices(d, m)))
    throw invalid_input_error("tensor value count does not match (d, m)");
}

double frobenius_inner(const SymTensor& A, const SymTensor& B) {
  A.check_shape();
  B.check_shape();
  if (A.d != B.d || A.m != B.m)
    throw invalid_input_error("tensor shapes differ in the inner product");
  const auto idx = enumerate_multiindices(A.d, A.m);
  double sum = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i)
    sum += static_cast<double>(gamma(idx[i])) * A.values(static_cast<Eigen::Index>(i)) *
           B.values(static_cast<Eigen::Index>(i));
  return sum;
}

double frobenius_norm(const SymTensor& A) { return std::sqrt(frobenius_inner(A, A)); }

SymTensor outer_power(const VectorXd& v, int m) {
  const int d = static_cast<int>(v.size());
  SymTensor out(d, m);
  const auto idx = enumerate_multiindices(d, m);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double p = 1.0;
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < idx[i][static_cast<std::size_t>(j)]; ++k) p *= v(j);
    out.values(static_cast<Eigen::Index>(i)) = p;
  }
  return out;
}

SymTensor to_sym_tensor(const Rank1Sum& r, int m) {
  if (r.vectors.empty()) throw invalid_input_error("rank-one sum has no terms");
  if (r.coeffs.size() != static_cast<Eigen::Index>(r.vectors.size()))
    throw invalid_input_error("rank-one sum has mismatched coefficient count");
  const int d = static_cast<int>(r.vectors.front().size());
  SymTensor out(d, m);
  for (std::size_t k = 0; k < r.vectors.size(); ++k) {
    if (r.vectors[k].size() != d)
      throw invalid_input_error("rank-one sum vectors have mixed dimensions");
    out.values += r.coeffs(static_cast<Eigen::Index>(k)) * outer_power(r.vectors[k], m).values;
  }
  return out;
}

namespace {

// Canonical tuple of a class: alpha_1 copies of 0, alpha_2 copies of 1, ...
std::vector<int> class_tuple(const MultiIndex& alpha) {
  std::vector<int> t;
  t.reserve(static_cast<std::size_t>(multi_order(alpha)));
  for (std::size_t j = 0; j < alpha.size(); ++j)
    for (int k = 0; k < alpha[j]; ++k) t.push_back(static_cast<int>(j));
  return t;
}

// Odometer increment over tuples in {0..d-1}^m; returns false after the last.
bool next_tuple(std::vector<int>& t, int d) {
  for (int k = static_cast<int>(t.size()) - 1; k >= 0; --k) {
    if (++t[static_cast<std::size_t>(k)] < d) return true;
    t[static_cast<std::size_t>(k)] = 0;
  }
  return false;
}

MultiIndex tuple_histogram(const std::vector<int>& t, int d) {
  MultiIndex alpha(static_cast<std::size_t>(d), 0);
  for (int i : t) ++alpha[static_cast<std::size_t>(i)];
  return alpha;
}

}  // namespace

SymTensor multilinear_mult(const Eigen::Ref<const MatrixXd>& B, const SymTensor& A) {
  A.check_shape();
  if (B.rows() != A.d || B.cols() != A.d)
    throw invalid_input_error("matrix size does not match tensor dimension");
  const MultiIndexMap map(A.d, A.m);
  SymTensor out(A.d, A.m);
  if (A.m == 0) {
    out.values = A.values;
    return out;
  }
  for (std::size_t i = 0; i < map.size(); ++i) {
    const std::vector<int> I = class_tuple(map.indices()[i]);
    double sum = 0.0;
    std::vector<int> J(static_cast<std::size_t>(A.m), 0);
    do {
      double w = 1.0;
      for (int k = 0; k < A.m; ++k)
        w *= B(I[static_cast<std::size_t>(k)], J[static_cast<std::size_t>(k)]);
      if (w != 0.0)
        sum += w * A.values(map.position(tuple_histogram(J, A.d)));
    } while (next_tuple(J, A.d));
    out.values(static_cast<Eigen::Index>(i)) = sum;
  }
  return out;
}

DenseTensor::DenseTensor(int d_, int m_) : d(d_), m(m_) {
  if (d < 1 || m < 0) throw invalid_input_error("tensor needs d >= 1 and m >= 0");
  double entries = std::pow(static_cast<double>(d), m);
  if (entries > 1e6)
    throw resource_error("dense tensor would exceed the 1e6-entry budget");
  flat = VectorXd::Zero(static_cast<Eigen::Index>(entries));
}

namespace {

Eigen::Index flat_index(const std::vector<int>& idx, int d) {
  Eigen::Index f = 0;
  for (int i : idx) f = f * d + i;
  return f;
}

}  // namespace

double& DenseTensor::at(const std::vector<int>& idx) {
  if (static_cast<int>(idx.size()) != m)
    throw invalid_input_error("dense tensor index has the wrong arity");
  return flat(flat_index(idx, d));
}

double DenseTensor::at(const std::vector<int>& idx) const {
  if (static_cast<int>(idx.size()) != m)
    throw invalid_input_error("dense tensor index has the wrong arity");
  return flat(flat_index(idx, d));
}

DenseTensor materialize(const SymTensor& A) {
  A.check_shape();
  const MultiIndexMap map(A.d, A.m);
  DenseTensor out(A.d, A.m);
  if (A.m == 0) {
    out.flat(0) = A.values(0);
    return out;
  }
  std::vector<int> I(static_cast<std::size_t>(A.m), 0);
  Eigen::Index f = 0;
  do {
    out.flat(f++) = A.values(map.position(tuple_histogram(I, A.d)));
  } while (next_tuple(I, A.d));
  return out;
}

DenseTensor multilinear_mult(const Eigen::Ref<const MatrixXd>& B, const DenseTensor& A,
                             int k) {
  if (B.rows() != A.d || B.cols() != A.d)
    throw invalid_input_error("matrix size does not match tensor dimension");
  if (k < 0 || k > A.m)
    throw invalid_input_error("slot count must satisfy 0 <= k <= m");
  // Contract one slot at a time: view the flat array as (d^p) x d x (d^s)
  // around the active slot and apply B there.
  DenseTensor out = A;
  const Eigen::Index dim = A.d;
  for (int slot = 0; slot < k; ++slot) {
    Eigen::Index prefix = 1;
    for (int p = 0; p < slot; ++p) prefix *= dim;
    Eigen::Index suffix = out.flat.size() / (prefix * dim);
    VectorXd next = VectorXd::Zero(out.flat.size());
    for (Eigen::Index a = 0; a < prefix; ++a)
      for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) {
          if (B(i, j) == 0.0) continue;
          next.segment(a * dim * suffix + i * suffix, suffix) +=
              B(i, j) * out.flat.segment(a * dim * suffix + j * suffix, suffix);
        }
    out.flat.swap(next);
  }
  return out;
}

SymTensor symmetrize(const DenseTensor& A) {
  const MultiIndexMap map(A.d, A.m);
  SymTensor out(A.d, A.m);
  if (A.m == 0) {
    out.values(0) = A.flat(0);
    return out;
  }
  VectorXd sums = VectorXd::Zero(static_cast<Eigen::Index>(map.size()));
  std::vector<int> I(static_cast<std::size_t>(A.m), 0);
  Eigen::Index f = 0;
  do {
    sums(map.position(tuple_histogram(I, A.d))) += A.flat(f++);
  } while (next_tuple(I, A.d));
  for (std::size_t i = 0; i < map.size(); ++i)
    out.values(static_cast<Eigen::Index>(i)) =
        sums(static_cast<Eigen::Index>(i)) / static_cast<double>(gamma(map.indices()[i]));
  return out;
}

double dense_frobenius_inner(const DenseTensor& A, const DenseTensor& B) {
  if (A.d != B.d || A.m != B.m)
    throw invalid_input_error("tensor shapes differ in the inner product");
  return A.flat.dot(B.flat);
}

DenseTensor outer_product(const std::vector<VectorXd>& vs) {
  if (vs.empty()) throw invalid_input_error("outer product needs at least one factor");
  const int d = static_cast<int>(vs.front().size());
  for (const auto& v : vs)
    if (v.size() != d) throw invalid_input_error("outer product factors have mixed dimensions");
  DenseTensor out(d, static_cast<int>(vs.size()));
  std::vector<int> I(vs.size(), 0);
  Eigen::Index f = 0;
  do {
    double p = 1.0;
    for (std::size_t k = 0; k < vs.size(); ++k) p *= vs[k](I[k]);
    out.flat(f++) = p;
  } while (next_tuple(I, d));
  return out;
}

}  // namespace hypodecay
