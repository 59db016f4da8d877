#include "mtmc/assignment.hpp"

#include <cmath>
#include <limits>

#include "mtmc/errors.hpp"

namespace mtmc::assign {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shortest augmenting path solver for rows <= cols. Maintains dual
// potentials u, v so every augmentation step is a Dijkstra search over
// reduced costs.
std::vector<int> solve_rows_le_cols(const CostMatrix& c) {
  const std::size_t n = c.rows();
  const std::size_t m = c.cols();
  std::vector<double> u(n, 0.0), v(m, 0.0);
  std::vector<int> col4row(n, -1), row4col(m, -1);
  std::vector<double> shortest(m);
  std::vector<int> path(m);
  std::vector<char> visited_row(n), remaining(m);

  for (std::size_t cur = 0; cur < n; ++cur) {
    std::fill(shortest.begin(), shortest.end(), kInf);
    std::fill(path.begin(), path.end(), -1);
    std::fill(visited_row.begin(), visited_row.end(), 0);
    std::fill(remaining.begin(), remaining.end(), 1);

    double min_val = 0.0;
    std::size_t i = cur;
    int sink = -1;
    while (sink == -1) {
      visited_row[i] = 1;
      int lowest = -1;
      double lowest_cost = kInf;
      for (std::size_t j = 0; j < m; ++j) {
        if (!remaining[j]) continue;
        const double r = min_val + c.at(i, j) - u[i] - v[j];
        if (r < shortest[j]) {
          shortest[j] = r;
          path[j] = static_cast<int>(i);
        }
        if (shortest[j] < lowest_cost) {
          lowest_cost = shortest[j];
          lowest = static_cast<int>(j);
        }
      }
      if (lowest == -1 || lowest_cost == kInf) {
        throw invariant_error("assignment: no augmenting path (non-finite costs?)");
      }
      min_val = lowest_cost;
      remaining[lowest] = 0;
      if (row4col[lowest] == -1) {
        sink = lowest;
      } else {
        i = static_cast<std::size_t>(row4col[lowest]);
      }
    }

    u[cur] += min_val;
    for (std::size_t r = 0; r < n; ++r) {
      if (visited_row[r] && r != cur) {
        u[r] += min_val - shortest[static_cast<std::size_t>(col4row[r])];
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (!remaining[j]) v[j] -= min_val - shortest[j];
    }

    int j = sink;
    while (true) {
      const int r = path[static_cast<std::size_t>(j)];
      row4col[static_cast<std::size_t>(j)] = r;
      const int tmp = col4row[static_cast<std::size_t>(r)];
      col4row[static_cast<std::size_t>(r)] = j;
      j = tmp;
      if (static_cast<std::size_t>(r) == cur) break;
    }
  }
  return col4row;
}

// Equal-cost refinement toward the lexicographically smallest
// row -> column vector (-1 sorts after any column). Total cost is
// preserved exactly: every move requires bitwise-equal cost sums.
void canonicalize(const CostMatrix& c, std::vector<int>& a) {
  const std::size_t n = c.rows();
  const std::size_t m = c.cols();
  std::vector<char> col_used(m, 0);
  for (int col : a) {
    if (col >= 0) col_used[static_cast<std::size_t>(col)] = 1;
  }
  for (int sweep = 0; sweep < 200; ++sweep) {
    bool changed = false;
    // Move a row's match to a smaller free column of equal cost.
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] < 0) continue;
      const std::size_t ci = static_cast<std::size_t>(a[i]);
      for (std::size_t j = 0; j < ci; ++j) {
        if (col_used[j]) continue;
        if (c.at(i, j) == c.at(i, ci)) {
          col_used[ci] = 0;
          col_used[j] = 1;
          a[i] = static_cast<int>(j);
          changed = true;
          break;
        }
      }
    }
    // Swap two rows' columns when it lowers lex order at equal cost.
    for (std::size_t i1 = 0; i1 < n; ++i1) {
      if (a[i1] < 0) continue;
      for (std::size_t i2 = i1 + 1; i2 < n; ++i2) {
        if (a[i2] < 0) continue;
        const std::size_t c1 = static_cast<std::size_t>(a[i1]);
        const std::size_t c2 = static_cast<std::size_t>(a[i2]);
        if (c2 < c1 &&
            c.at(i1, c2) + c.at(i2, c1) == c.at(i1, c1) + c.at(i2, c2)) {
          std::swap(a[i1], a[i2]);
          changed = true;
        }
      }
    }
    // Shift a match to an earlier unassigned row of equal cost.
    for (std::size_t i1 = 0; i1 < n; ++i1) {
      if (a[i1] >= 0) continue;
      for (std::size_t i2 = i1 + 1; i2 < n; ++i2) {
        if (a[i2] < 0) continue;
        const std::size_t col = static_cast<std::size_t>(a[i2]);
        if (c.at(i1, col) == c.at(i2, col)) {
          a[i1] = a[i2];
          a[i2] = -1;
          changed = true;
          break;
        }
      }
    }
    if (!changed) break;
  }
}

}  // namespace

std::vector<int> solve_min_cost(const CostMatrix& cost) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  if (n == 0 || m == 0) return std::vector<int>(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!std::isfinite(cost.at(i, j))) {
        throw data_error("assignment: non-finite cost entry");
      }
    }
  }

  std::vector<int> result(n, -1);
  if (n <= m) {
    result = solve_rows_le_cols(cost);
  } else {
    CostMatrix t(m, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) t.at(j, i) = cost.at(i, j);
    }
    const std::vector<int> col_to_row = solve_rows_le_cols(t);
    for (std::size_t j = 0; j < m; ++j) {
      if (col_to_row[j] >= 0) result[static_cast<std::size_t>(col_to_row[j])] = static_cast<int>(j);
    }
  }
  canonicalize(cost, result);
  return result;
}

std::vector<int> solve_max_value(const CostMatrix& value) {
  CostMatrix neg(value.rows(), value.cols());
  for (std::size_t i = 0; i < value.rows(); ++i) {
    for (std::size_t j = 0; j < value.cols(); ++j) neg.at(i, j) = -value.at(i, j);
  }
  return solve_min_cost(neg);
}

std::vector<std::pair<int, int>> assignment_pairs(
    const std::vector<int>& row_to_col) {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < row_to_col.size(); ++i) {
    if (row_to_col[i] >= 0) pairs.emplace_back(static_cast<int>(i), row_to_col[i]);
  }
  return pairs;
}

}  // namespace mtmc::assign
