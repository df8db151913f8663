#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace pitchtrack {

/// Dense row-major matrix.
template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using CostMatrix = Matrix<double>;
/// Nonzero entries mark cells that may never be assigned.
using ForbidMask = Matrix<unsigned char>;

struct AssignmentResult {
    /// (row, column) pairs sorted by row.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    double total_cost = 0.0;
};

/// Minimum-cost assignment of rows to columns (Kuhn-Munkres with potentials).
///
/// Covers min(rows, cols) pairs when the non-forbidden cells allow it;
/// otherwise returns a maximum-cardinality matching of minimum cost among
/// those. Infinite costs are treated as forbidden. Among equal-cost optima the
/// lowest row takes the lowest free column. Throws std::invalid_argument on
/// NaN costs or a mask of the wrong shape.
AssignmentResult solve_assignment(const CostMatrix& cost);
AssignmentResult solve_assignment(const CostMatrix& cost, const ForbidMask& forbid);

/// Same optimum as solve_assignment, computed independently on each connected
/// component of the non-forbidden cells. Much faster for sparse gated
/// matrices such as IoU-gated matching.
AssignmentResult solve_assignment_blockwise(const CostMatrix& cost, const ForbidMask& forbid);

}  // namespace pitchtrack
