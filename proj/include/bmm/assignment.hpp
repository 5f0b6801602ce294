#pragma once

#include <cassert>
#include <concepts>
#include <cstddef>
#include <limits>
#include <vector>

namespace bmm {

/// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Kuhn-Munkres with vertex potentials (shortest augmenting path form),
/// O(m^2 n) for an n x m weight table with n >= m.
///
/// Every column is matched to a distinct row and the summed weight is
/// maximal. Surplus rows act as the zero-weight dummy columns of the square
/// formulation, so no explicit padding is built. The scan always prefers the
/// lowest index among equal slacks, which makes the result deterministic.
///
/// Returns `row_of_col`, where row_of_col[c] is the row matched to column c.
template <std::floating_point T>
std::vector<std::size_t> max_weight_assignment(const Matrix<T>& weights) {
  const std::size_t n = weights.rows();  // candidates per column
  const std::size_t m = weights.cols();  // columns that must all be matched
  assert(n >= m);
  if (m == 0) return {};

  constexpr T inf = std::numeric_limits<T>::infinity();
  // 1-based potentials; index 0 is the virtual root of each search tree.
  std::vector<T> u(m + 1, T{0}), v(n + 1, T{0});
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);

  for (std::size_t col = 1; col <= m; ++col) {
    owner[0] = col;
    std::size_t j0 = 0;
    std::vector<T> slack(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = owner[j0];
      T delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        // minimisation over negated weights
        const T cur = -weights(j - 1, i0 - 1) - u[i0] - v[j];
        if (cur < slack[j]) {
          slack[j] = cur;
          way[j] = j0;
        }
        if (slack[j] < delta) {
          delta = slack[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> row_of_col(m, 0);
  for (std::size_t j = 1; j <= n; ++j) {
    if (owner[j] != 0) row_of_col[owner[j] - 1] = j - 1;
  }
  return row_of_col;
}

}  // namespace bmm
