#include <algorithm>
#include <cmath>
#include <limits>

#include "intentdisc/errors.hpp"
#include "intentdisc/metrics.hpp"

namespace intentdisc {

CostMatrix::CostMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw ConfigError("ragged cost matrix");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

// Shortest augmenting path with row/column potentials (Kuhn-Munkres, Jonker-Volgenant style).
LinearAssignment hungarian(const CostMatrix& cost) {
  const std::size_t n = cost.rows();
  if (n == 0) throw ConfigError("hungarian: empty cost matrix");
  if (cost.cols() != n) throw ConfigError("hungarian: cost matrix must be square");
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      if (!std::isfinite(cost(r, c))) throw ConfigError("hungarian: non-finite cost entry");
    }
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // 1-based internals; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match_col(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match_col[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t r0 = match_col[col0];
      double delta = kInf;
      std::size_t col1 = 0;
      for (std::size_t c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double reduced = cost(r0 - 1, c - 1) - u[r0] - v[c];
        if (reduced < minv[c]) {
          minv[c] = reduced;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (std::size_t c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match_col[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match_col[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match_col[col0] = match_col[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  LinearAssignment result;
  result.row_to_col.assign(n, 0);
  for (std::size_t c = 1; c <= n; ++c) result.row_to_col[match_col[c] - 1] = c - 1;
  for (std::size_t r = 0; r < n; ++r) result.cost += cost(r, result.row_to_col[r]);
  return result;
}

LinearAssignment hungarian_rectangular(const CostMatrix& cost) {
  const std::size_t n = std::max(cost.rows(), cost.cols());
  if (n == 0) throw ConfigError("hungarian: empty cost matrix");
  if (cost.rows() == cost.cols()) return hungarian(cost);
  CostMatrix square(n, n, 0.0);
  for (std::size_t r = 0; r < cost.rows(); ++r) {
    for (std::size_t c = 0; c < cost.cols(); ++c) square(r, c) = cost(r, c);
  }
  LinearAssignment full = hungarian(square);
  full.row_to_col.resize(cost.rows());
  return full;
}

}  // namespace intentdisc
