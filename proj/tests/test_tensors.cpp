#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "hypodecay/multi_index.hpp"
#include "hypodecay/rng.hpp"
#include "hypodecay/sym_tensor.hpp"

using namespace hypodecay;

namespace {

VectorXd unit_vector(Rng& rng, int d) {
  VectorXd v = rng.normal_vector(d);
  while (v.norm() < 1e-3) v = rng.normal_vector(d);
  return v / v.norm();
}

}  // namespace

TEST_CASE("multi-index enumeration follows the graded reverse ordering") {
  // pinned sequence for d=3, m=2
  const auto idx = enumerate_multiindices(3, 2);
  REQUIRE(idx.size() == 6);
  CHECK(idx[0] == MultiIndex({2, 0, 0}));
  CHECK(idx[1] == MultiIndex({1, 1, 0}));
  CHECK(idx[2] == MultiIndex({0, 2, 0}));
  CHECK(idx[3] == MultiIndex({1, 0, 1}));
  CHECK(idx[4] == MultiIndex({0, 1, 1}));
  CHECK(idx[5] == MultiIndex({0, 0, 2}));

  // d=2: the order has the first entry strictly decreasing
  const auto idx2 = enumerate_multiindices(2, 3);
  REQUIRE(idx2.size() == 4);
  CHECK(idx2[0] == MultiIndex({3, 0}));
  CHECK(idx2[1] == MultiIndex({2, 1}));
  CHECK(idx2[2] == MultiIndex({1, 2}));
  CHECK(idx2[3] == MultiIndex({0, 3}));

  // every enumeration has the right size and every index the right order
  for (int d = 1; d <= 4; ++d)
    for (int m = 0; m <= 5; ++m) {
      const auto all = enumerate_multiindices(d, m);
      CHECK(all.size() == num_multiindices(d, m));
      for (const auto& a : all) {
        CHECK(static_cast<int>(a.size()) == d);
        CHECK(multi_order(a) == m);
      }
    }
}

TEST_CASE("multi-index lookup inverts the enumeration") {
  const MultiIndexMap map(3, 4);
  const auto& idx = map.indices();
  for (int i = 0; i < static_cast<int>(idx.size()); ++i)
    CHECK(map.position(idx[i]) == i);
  CHECK_THROWS_AS(map.position(MultiIndex({1, 1, 1})), invalid_input_error);  // order 3
  CHECK_THROWS_AS(map.position(MultiIndex({4, 0})), invalid_input_error);     // wrong d
}

TEST_CASE("combinatorial weights") {
  CHECK(factorial_multi(MultiIndex({3, 1, 2})) == 12);  // 3! * 1! * 2!
  CHECK(factorial_multi(MultiIndex({0, 0})) == 1);
  CHECK(gamma(MultiIndex({2, 0, 0})) == 1);
  CHECK(gamma(MultiIndex({1, 1, 0})) == 2);
  CHECK(gamma(MultiIndex({1, 1, 1})) == 6);
  CHECK(gamma(MultiIndex({2, 2})) == 6);       // 4!/(2!2!)
  CHECK(gamma(MultiIndex({3, 1})) == 4);       // 4!/3!
  CHECK(num_multiindices(3, 2) == 6);
  CHECK(num_multiindices(2, 3) == 4);
  CHECK(num_multiindices(4, 4) == 35);
  CHECK(num_multiindices(1, 7) == 1);

  // gamma counts the tuples in each class: the counts tile d^m
  for (int d = 1; d <= 4; ++d)
    for (int m = 0; m <= 4; ++m) {
      std::uint64_t total = 0;
      for (const auto& a : enumerate_multiindices(d, m)) total += gamma(a);
      CHECK(total == static_cast<std::uint64_t>(std::llround(std::pow(d, m))));
    }
}

TEST_CASE("classwise storage matches dense entries") {
  Rng rng(31);
  for (int d = 2; d <= 3; ++d)
    for (int m = 1; m <= 3; ++m) {
      SymTensor A(d, m);
      A.values = rng.normal_vector(static_cast<int>(num_multiindices(d, m)));
      const DenseTensor full = materialize(A);

      // pick a few tuples, histogram them, compare entries
      const MultiIndexMap map(d, m);
      std::vector<int> tuple(m);
      for (int trial = 0; trial < 10; ++trial) {
        for (int k = 0; k < m; ++k) tuple[k] = rng.uniform_int(0, d - 1);
        MultiIndex hist(d, 0);
        for (int k = 0; k < m; ++k) ++hist[tuple[k]];
        CHECK(full.at(tuple) == A.values[map.position(hist)]);
      }

      // round-trip through symmetrize
      const SymTensor back = symmetrize(full);
      CHECK((back.values - A.values).norm() < 1e-12 * std::max(1.0, A.values.norm()));
    }
}

TEST_CASE("frobenius inner product weights classes by their tuple counts") {
  Rng rng(32);
  const int d = 3, m = 3;
  SymTensor A(d, m), B(d, m);
  A.values = rng.normal_vector(static_cast<int>(num_multiindices(d, m)));
  B.values = rng.normal_vector(static_cast<int>(num_multiindices(d, m)));
  const double classwise = frobenius_inner(A, B);
  const double dense = dense_frobenius_inner(materialize(A), materialize(B));
  CHECK(classwise == doctest::Approx(dense).epsilon(1e-12));
  CHECK(frobenius_norm(A) ==
        doctest::Approx(std::sqrt(frobenius_inner(A, A))).epsilon(1e-14));
}

TEST_CASE("outer power and rank-one sums") {
  // explicit 2x2 oracle: (v (x) v)_{ij} = v_i v_j
  VectorXd v(2);
  v << 2.0, -3.0;
  const SymTensor vv = outer_power(v, 2);
  const MultiIndexMap map(2, 2);
  CHECK(vv.values[map.position({2, 0})] == doctest::Approx(4.0));
  CHECK(vv.values[map.position({1, 1})] == doctest::Approx(-6.0));
  CHECK(vv.values[map.position({0, 2})] == doctest::Approx(9.0));

  // |v^(x)m|_F = |v|^m
  Rng rng(33);
  for (int m = 1; m <= 4; ++m) {
    const VectorXd w = rng.normal_vector(3);
    CHECK(frobenius_norm(outer_power(w, m)) ==
          doctest::Approx(std::pow(w.norm(), m)).epsilon(1e-12));
  }

  // linearity of the rank-one representation
  Rank1Sum r;
  r.coeffs = VectorXd(2);
  r.coeffs << 1.5, -0.5;
  r.vectors = {VectorXd(3), VectorXd(3)};
  r.vectors[0] << 1, 0, 2;
  r.vectors[1] << 0, 1, -1;
  const SymTensor sum = to_sym_tensor(r, 3);
  SymTensor manual(3, 3);
  manual.values = 1.5 * outer_power(r.vectors[0], 3).values -
                  0.5 * outer_power(r.vectors[1], 3).values;
  CHECK((sum.values - manual.values).norm() < 1e-14);
}

TEST_CASE("matrix action distributes over rank-one factors") {
  // B acting on all slots of sum_k lambda_k v_k^(x)m gives
  // sum_k lambda_k (B v_k)^(x)m
  Rng rng(34);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + rng.uniform_int(0, 2);
    const int m = 1 + rng.uniform_int(0, 3);
    const int s = 1 + rng.uniform_int(0, 2);
    const MatrixXd B = rng.normal_matrix(d, d);
    Rank1Sum r;
    r.coeffs = rng.normal_vector(s);
    for (int k = 0; k < s; ++k) r.vectors.push_back(unit_vector(rng, d));

    const SymTensor lhs = multilinear_mult(B, to_sym_tensor(r, m));
    Rank1Sum mapped;
    mapped.coeffs = r.coeffs;
    for (int k = 0; k < s; ++k) mapped.vectors.push_back(B * r.vectors[k]);
    const SymTensor rhs = to_sym_tensor(mapped, m);
    const double scale = std::max(1.0, rhs.values.norm());
    CHECK((lhs.values - rhs.values).norm() < 1e-10 * scale);
  }
}

TEST_CASE("inner products of elementary outer products factor slotwise") {
  // <v_1 (x) ... (x) v_m, w_1 (x) ... (x) w_m> = prod_i <v_i, w_i>
  Rng rng(35);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + rng.uniform_int(0, 2);
    const int m = 1 + rng.uniform_int(0, 3);
    std::vector<VectorXd> vs, ws;
    double expected = 1.0;
    for (int k = 0; k < m; ++k) {
      vs.push_back(rng.normal_vector(d));
      ws.push_back(rng.normal_vector(d));
      expected *= vs.back().dot(ws.back());
    }
    const double got = dense_frobenius_inner(outer_product(vs), outer_product(ws));
    CHECK(got == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("inner products of equal-power tensors are powers of the inner product") {
  // <v^(x)m, w^(x)m> = <v, w>^m, classwise path
  Rng rng(36);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + rng.uniform_int(0, 2);
    const int m = 1 + rng.uniform_int(0, 3);
    const VectorXd v = rng.normal_vector(d);
    const VectorXd w = rng.normal_vector(d);
    const double got = frobenius_inner(outer_power(v, m), outer_power(w, m));
    CHECK(got == doctest::Approx(std::pow(v.dot(w), m)).epsilon(1e-10));
  }
}

TEST_CASE("one-slot action of a PSD matrix is nonnegative on symmetric tensors") {
  // <A, B (.)_1 A> >= 0 when B is PSD
  Rng rng(37);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + rng.uniform_int(0, 2);
    const int m = 1 + rng.uniform_int(0, 3);
    const int rank = 1 + rng.uniform_int(0, d - 1);
    const MatrixXd G = rng.normal_matrix(d, rank);
    const MatrixXd B = G * G.transpose();
    SymTensor A(d, m);
    A.values = rng.normal_vector(static_cast<int>(num_multiindices(d, m)));
    const DenseTensor dense = materialize(A);
    const DenseTensor BA = multilinear_mult(B, dense, 1);
    const double quad = dense_frobenius_inner(dense, BA);
    CHECK(quad >= -1e-10 * std::max(1.0, std::abs(quad)));
  }
}

TEST_CASE("k-slot action is bounded by the k-th power of the matrix norm") {
  // |B (.)_k A|_F <= |B|^k |A|_F
  Rng rng(38);
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 2 + rng.uniform_int(0, 2);
    const int m = 1 + rng.uniform_int(0, 3);
    const int k = 1 + rng.uniform_int(0, m - 1);
    const MatrixXd B = rng.normal_matrix(d, d);
    SymTensor A(d, m);
    A.values = rng.normal_vector(static_cast<int>(num_multiindices(d, m)));
    const DenseTensor dense = materialize(A);
    const DenseTensor BA = multilinear_mult(B, dense, k);
    const double lhs = std::sqrt(dense_frobenius_inner(BA, BA));
    const double bnorm = B.jacobiSvd().singularValues()(0);
    const double rhs =
        std::pow(bnorm, k) * std::sqrt(dense_frobenius_inner(dense, dense));
    CHECK(lhs <= rhs * (1.0 + 1e-10));
  }
}

TEST_CASE("full-slot action agrees between classwise and dense paths") {
  Rng rng(39);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 2 + rng.uniform_int(0, 2);
    const int m = 1 + rng.uniform_int(0, 3);
    const MatrixXd B = rng.normal_matrix(d, d);
    SymTensor A(d, m);
    A.values = rng.normal_vector(static_cast<int>(num_multiindices(d, m)));
    const SymTensor classwise = multilinear_mult(B, A);
    const DenseTensor dense = materialize(A);
    const DenseTensor full = multilinear_mult(B, dense, m);
    const SymTensor sym = symmetrize(full);
    CHECK((classwise.values - sym.values).norm() <
          1e-10 * std::max(1.0, sym.values.norm()));
  }
}

TEST_CASE("symmetrization averages slot permutations") {
  // worked 2x2 example: T with entries T(0,1) = p, T(1,0) = q symmetrizes
  // to off-diagonal class value (p+q)/2
  DenseTensor T(2, 2);
  T.flat.setZero();
  T.at({0, 1}) = 3.0;
  T.at({1, 0}) = 1.0;
  T.at({0, 0}) = 5.0;
  const SymTensor S = symmetrize(T);
  const MultiIndexMap map(2, 2);
  CHECK(S.values[map.position({2, 0})] == doctest::Approx(5.0));
  CHECK(S.values[map.position({1, 1})] == doctest::Approx(2.0));
  CHECK(S.values[map.position({0, 2})] == doctest::Approx(0.0));

  // symmetrize is a projection: idempotent through materialize
  Rng rng(40);
  DenseTensor R(3, 3);
  R.flat = rng.normal_vector(27);
  const SymTensor once = symmetrize(R);
  const SymTensor twice = symmetrize(materialize(once));
  CHECK((once.values - twice.values).norm() < 1e-13);
}

TEST_CASE("dense materialization guard") {
  CHECK_THROWS_AS(DenseTensor(10, 7), resource_error);  // 10^7 entries
  CHECK_NOTHROW(DenseTensor(10, 6));
  SymTensor bad(2, 2);
  bad.values = VectorXd::Zero(5);  // wrong class count
  CHECK_THROWS_AS(bad.check_shape(), invalid_input_error);
  CHECK_THROWS_AS(frobenius_inner(SymTensor(2, 2), SymTensor(3, 2)),
                  invalid_input_error);
}
