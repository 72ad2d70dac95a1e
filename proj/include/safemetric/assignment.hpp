// Copyright 2026 The safemetric Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Kuhn-Munkres (Hungarian) assignment with row/column potentials, O(n^2 m).

#ifndef SAFEMETRIC_ASSIGNMENT_HPP_
#define SAFEMETRIC_ASSIGNMENT_HPP_

#include <cstddef>
#include <limits>
#include <vector>

namespace safemetric {

/// Dense row-major matrix of pair weights.
class WeightMatrix {
 public:
  WeightMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

namespace detail {

// Minimum-cost assignment of every row to a distinct column; requires
// rows <= cols. Returns the column for each row.
inline std::vector<std::size_t> min_cost_rows_le_cols(const WeightMatrix& cost) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, kInf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace detail

inline constexpr long kUnassigned = -1;

/// Assignment maximizing the summed weight. Every row of the smaller side is
/// paired; callers drop pairs whose weight marks them as ineligible.
/// Returns, per row, the chosen column or kUnassigned.
inline std::vector<long> max_weight_assignment(const WeightMatrix& weights) {
  const std::size_t r = weights.rows();
  const std::size_t c = weights.cols();
  std::vector<long> result(r, kUnassigned);
  if (r == 0 || c == 0) return result;
  if (r <= c) {
    WeightMatrix cost(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) cost(i, j) = -weights(i, j);
    const auto cols = detail::min_cost_rows_le_cols(cost);
    for (std::size_t i = 0; i < r; ++i) result[i] = static_cast<long>(cols[i]);
  } else {
    WeightMatrix cost(c, r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) cost(j, i) = -weights(i, j);
    const auto rows = detail::min_cost_rows_le_cols(cost);
    for (std::size_t j = 0; j < c; ++j) result[rows[j]] = static_cast<long>(j);
  }
  return result;
}

}  // namespace safemetric

#endif  // SAFEMETRIC_ASSIGNMENT_HPP_
