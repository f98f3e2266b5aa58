#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <utility>
#include <vector>

#include "visrl/types.hpp"

namespace visrl {

template <typename T>
struct Assignment {
  // (row, col) pairs sorted by row; size min(rows, cols).
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  T total_cost{};
};

/// Minimum-cost assignment on a rectangular matrix using the shortest
/// augmenting path form of the Hungarian method (potentials on both sides,
/// O(r^2 c) with r = min(rows, cols)). No padding: when rows > cols the
/// problem is solved on the transpose.
template <typename T>
Assignment<T> hungarian(const Matrix<T>& cost) {
  static_assert(std::is_arithmetic_v<T>);
  const bool transposed = cost.rows() > cost.cols();
  const std::size_t n = transposed ? cost.cols() : cost.rows();
  const std::size_t m = transposed ? cost.rows() : cost.cols();
  Assignment<T> result;
  if (n == 0) return result;

  auto at = [&](std::size_t r, std::size_t c) -> T {
    return transposed ? cost(c, r) : cost(r, c);
  };

  constexpr T kInf = std::numeric_limits<T>::has_infinity ? std::numeric_limits<T>::infinity()
                                                          : std::numeric_limits<T>::max() / 2;
  // 1-based with column 0 as the virtual root of each augmenting tree.
  std::vector<T> u(n + 1, T{}), v(m + 1, T{}), minv(m + 1);
  std::vector<std::size_t> owner(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);

  for (std::size_t r = 1; r <= n; ++r) {
    owner[0] = r;
    std::size_t col0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), char{0});
    do {
      used[col0] = 1;
      const std::size_t row0 = owner[col0];
      T delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= m; ++c) {
        if (used[c]) continue;
        const T reduced = at(row0 - 1, c - 1) - u[row0] - v[c];
        if (reduced < minv[c]) {
          minv[c] = reduced;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= m; ++c) {
        if (used[c]) {
          u[owner[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (owner[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      owner[col0] = owner[col1];
      col0 = col1;
    } while (col0 != 0);
  }

  result.pairs.reserve(n);
  for (std::size_t c = 1; c <= m; ++c) {
    if (owner[c] == 0) continue;
    const std::size_t r = owner[c] - 1;
    const std::size_t col = c - 1;
    result.pairs.emplace_back(transposed ? col : r, transposed ? r : col);
    result.total_cost += at(r, col);
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

}  // namespace visrl
