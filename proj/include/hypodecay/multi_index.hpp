#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "hypodecay/errors.hpp"

namespace hypodecay {

/// A multi-index alpha in N_0^d, stored as one entry per coordinate.
using MultiIndex = std::vector<int>;

/// Sum of the entries (the order |alpha|).
int multi_order(const MultiIndex& alpha);

/// alpha! = prod_i alpha_i!
std::uint64_t factorial_multi(const MultiIndex& alpha);

/// Multinomial weight gamma_alpha = |alpha|! / alpha! — the number of
/// distinct tuples (i_1, ..., i_m) whose histogram is alpha.
std::uint64_t gamma(const MultiIndex& alpha);

/// Number of multi-indices of order m in dimension d: binom(d+m-1, m).
std::uint64_t num_multiindices(int d, int m);

/// All multi-indices of order m in dimension d, in graded reverse
/// lexicographic order: alpha precedes beta when, at the rightmost
/// position where they differ, alpha has the smaller entry.
/// For d=3, m=2: (2,0,0), (1,1,0), (0,2,0), (1,0,1), (0,1,1), (0,0,2).
std::vector<MultiIndex> enumerate_multiindices(int d, int m);

/// Position lookup for a fixed (d, m) enumeration.
class MultiIndexMap {
 public:
  MultiIndexMap(int d, int m);

  int d() const { return d_; }
  int m() const { return m_; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }

  /// Index of alpha within the canonical enumeration; throws on a
  /// multi-index of the wrong dimension or order.
  int position(const MultiIndex& alpha) const;

 private:
  int d_;
  int m_;
  std::vector<MultiIndex> indices_;
  std::map<MultiIndex, int> positions_;
};

}  // namespace hypodecay
