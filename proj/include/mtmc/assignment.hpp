#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace mtmc::assign {

// Dense rectangular cost matrix, row-major.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Minimum-cost linear assignment (shortest augmenting path with dual
// potentials, O(n^2 m)). Entries must be finite. Returns row -> column,
// -1 for rows left unassigned when rows > cols; the smaller dimension is
// fully assigned. Among equal-cost optima the result is canonicalized
// toward the lexicographically smallest row -> column vector (unassigned
// sorting last) reachable by equal-cost reassignments, so the output is
// deterministic.
std::vector<int> solve_min_cost(const CostMatrix& cost);

// Assignment maximizing total value; same shape contract as
// solve_min_cost.
std::vector<int> solve_max_value(const CostMatrix& value);

// Convenience: (row, col) pairs of an assignment vector, ascending rows.
std::vector<std::pair<int, int>> assignment_pairs(
    const std::vector<int>& row_to_col);

}  // namespace mtmc::assign
