#include "hypodecay/multi_index.hpp"

#include <algorithm>
#include <numeric>

namespace hypodecay {

int multi_order(const MultiIndex& alpha) {
  return std::accumulate(alpha.begin(), alpha.end(), 0);
}

std::uint64_t factorial_multi(const MultiIndex& alpha) {
  std::uint64_t f = 1;
  for (int a : alpha) {
    if (a < 0) throw invalid_input_error("multi-index entries must be non-negative");
    for (int k = 2; k <= a; ++k) f *= static_cast<std::uint64_t>(k);
  }
  return f;
}

std::uint64_t gamma(const MultiIndex& alpha) {
  // |alpha|! / alpha! computed as a running product of binomials to avoid
  // overflowing the numerator: choose the slots of each coordinate in turn.
  std::uint64_t result = 1;
  int used = 0;
  for (int a : alpha) {
    if (a < 0) throw invalid_input_error("multi-index entries must be non-negative");
    for (int k = 1; k <= a; ++k) {
      ++used;
      result = result * static_cast<std::uint64_t>(used) / static_cast<std::uint64_t>(k);
    }
  }
  return result;
}

std::uint64_t num_multiindices(int d, int m) {
  if (d < 1 || m < 0) throw invalid_input_error("need dimension >= 1 and order >= 0");
  // binom(d+m-1, m), multiplicative form keeps intermediates integral.
  std::uint64_t result = 1;
  for (int k = 1; k <= m; ++k)
    result = result * static_cast<std::uint64_t>(d - 1 + k) / static_cast<std::uint64_t>(k);
  return result;
}

namespace {

void enumerate_rec(int d, int m, MultiIndex& partial, std::vector<MultiIndex>& out) {
  if (static_cast<int>(partial.size()) == d - 1) {
    partial.push_back(m);
    out.push_back(partial);
    partial.pop_back();
    return;
  }
  for (int a = m; a >= 0; --a) {
    partial.push_back(a);
    enumerate_rec(d, m - a, partial, out);
    partial.pop_back();
  }
}

bool grevlex_before(const MultiIndex& a, const MultiIndex& b) {
  // Rightmost differing position decides: smaller entry there means earlier.
  for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

}  // namespace

std::vector<MultiIndex> enumerate_multiindices(int d, int m) {
  if (d < 1 || m < 0) throw invalid_input_error("need dimension >= 1 and order >= 0");
  std::vector<MultiIndex> out;
  out.reserve(num_multiindices(d, m));
  MultiIndex partial;
  partial.reserve(d);
  enumerate_rec(d, m, partial, out);
  std::sort(out.begin(), out.end(), grevlex_before);
  return out;
}

MultiIndexMap::MultiIndexMap(int d, int m)
    : d_(d), m_(m), indices_(enumerate_multiindices(d, m)) {
  for (std::size_t i = 0; i < indices_.size(); ++i)
    positions_[indices_[i]] = static_cast<int>(i);
}

int MultiIndexMap::position(const MultiIndex& alpha) const {
  auto it = positions_.find(alpha);
  if (it == positions_.end())
    throw invalid_input_error("multi-index not of the expected dimension and order");
  return it->second;
}

}  // namespace hypodecay
