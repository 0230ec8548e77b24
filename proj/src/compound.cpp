#include "kcontract/compound.hpp"

#include <sstream>
#include <stdexcept>

#include <Eigen/LU>

#include "kcontract/kernels.hpp"

namespace kc {

namespace {

void check_order(int n, int k, const char* what) {
  if (k < 1 || k > n) {
    std::ostringstream os;
    os << what << ": order k = " << k << " out of range [1, " << n << "]";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

std::vector<std::vector<int>> IndexSubsets::one_based() const {
  auto out = subsets;
  for (auto& t : out)
    for (int& i : t) ++i;
  return out;
}

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

IndexSubsets index_subsets(int n, int k) {
  check_order(n, k, "index_subsets");
  IndexSubsets out;
  out.n = n;
  out.k = k;
  out.subsets.reserve(static_cast<std::size_t>(binomial(n, k)));
  std::vector<int> t(k);
  for (int i = 0; i < k; ++i) t[i] = i;
  while (true) {
    out.subsets.push_back(t);
    int p = k - 1;
    while (p >= 0 && t[p] == n - k + p) --p;
    if (p < 0) break;
    ++t[p];
    for (int i = p + 1; i < k; ++i) t[i] = t[i - 1] + 1;
  }
  return out;
}

long long subset_rank(const std::vector<int>& tuple, int n) {
  const int k = static_cast<int>(tuple.size());
  long long r = 0;
  int prev = -1;
  for (int p = 0; p < k; ++p) {
    for (int v = prev + 1; v < tuple[p]; ++v) r += binomial(n - v - 1, k - p - 1);
    prev = tuple[p];
  }
  return r;
}

double minor_det(const Matrix& q, const std::vector<int>& rows, const std::vector<int>& cols) {
  const std::size_t k = rows.size();
  auto at = [&](std::size_t i, std::size_t j) { return q(rows[i], cols[j]); };
  switch (k) {
    case 1:
      return at(0, 0);
    case 2:
      return at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0);
    case 3:
      return at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
             at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
             at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
    default: {
      Matrix sub(k, k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) sub(i, j) = at(i, j);
      return Eigen::PartialPivLU<Matrix>(sub).determinant();
    }
  }
}

Matrix multiplicative_compound(const Matrix& q, int k) {
  const int mn = static_cast<int>(std::min(q.rows(), q.cols()));
  check_order(mn, k, "multiplicative_compound");
  require_finite(q, "multiplicative_compound");
  return kernels::omp::multiplicative_compound(q, k);
}

Matrix additive_compound(const Matrix& q, int k) {
  require_square(q, "additive_compound");
  const int n = static_cast<int>(q.rows());
  check_order(n, k, "additive_compound");
  const IndexSubsets idx = index_subsets(n, k);
  const Eigen::Index N = static_cast<Eigen::Index>(idx.size());
  Matrix out = Matrix::Zero(N, N);
  std::vector<char> member(n);
  std::vector<int> j_tuple(k);
  for (Eigen::Index a = 0; a < N; ++a) {
    const auto& I = idx.subsets[a];
    std::fill(member.begin(), member.end(), 0);
    double diag = 0.0;
    for (int i : I) {
      member[i] = 1;
      diag += q(i, i);
    }
    out(a, a) = diag;
    // Replace I[p] = r by s (not in I); J is the sorted result, s lands at position pos.
    for (int p = 0; p < k; ++p) {
      const int r = I[p];
      for (int s = 0; s < n; ++s) {
        if (member[s]) continue;
        int pos = 0;
        int w = 0;
        bool placed = false;
        for (int t = 0; t < k; ++t) {
          if (t == p) continue;
          if (!placed && s < I[t]) {
            pos = w;
            j_tuple[w++] = s;
            placed = true;
          }
          j_tuple[w++] = I[t];
        }
        if (!placed) {
          pos = w;
          j_tuple[w++] = s;
        }
        const Eigen::Index b = static_cast<Eigen::Index>(subset_rank(j_tuple, n));
        const double sign = ((p + pos) % 2 == 0) ? 1.0 : -1.0;
        out(a, b) = sign * q(r, s);
      }
    }
  }
  return out;
}

}  // namespace kc
