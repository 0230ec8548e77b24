#pragma once

#include <vector>

#include "kcontract/numkernel.hpp"

namespace kc {

/// All strictly increasing k-tuples of {0..n-1} in lexicographic order.
/// Stored 0-based; one_based() gives the labels used in printed layouts.
struct IndexSubsets {
  int n = 0;
  int k = 0;
  std::vector<std::vector<int>> subsets;

  std::size_t size() const { return subsets.size(); }
  std::vector<std::vector<int>> one_based() const;
};

long long binomial(int n, int k);

IndexSubsets index_subsets(int n, int k);

/// Position of a sorted 0-based tuple in the lexicographic enumeration.
long long subset_rank(const std::vector<int>& tuple, int n);

/// Matrix of all k x k minors, rows/cols in lexicographic order.
Matrix multiplicative_compound(const Matrix& q, int k);

/// Closed-form additive compound. d/de (I + eQ)^(k) at e = 0.
Matrix additive_compound(const Matrix& q, int k);

/// Determinant of the k x k submatrix of q on rows/cols (0-based, sorted).
double minor_det(const Matrix& q, const std::vector<int>& rows, const std::vector<int>& cols);

}  // namespace kc
