#include "pitchtrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pitchtrack {

namespace {

bool is_forbidden(const CostMatrix& cost, const ForbidMask* forbid, std::size_t r, std::size_t c) {
    if (forbid && (*forbid)(r, c)) return true;
    const double v = cost(r, c);
    if (std::isnan(v)) throw std::invalid_argument("assignment cost is NaN");
    return std::isinf(v);
}

// Shortest augmenting path Hungarian for n <= m on a dense matrix.
// Returns for every row the assigned column.
std::vector<std::size_t> hungarian(const Matrix<double>& a) {
    const std::size_t n = a.rows();
    const std::size_t m = a.cols();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    std::vector<double> minv(m + 1);
    std::vector<char> used(m + 1);

    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
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

AssignmentResult solve_impl(const CostMatrix& cost, const ForbidMask* forbid) {
    if (forbid && (forbid->rows() != cost.rows() || forbid->cols() != cost.cols())) {
        throw std::invalid_argument("forbid mask shape does not match cost matrix");
    }
    AssignmentResult result;
    if (cost.empty()) return result;

    const bool transpose = cost.rows() > cost.cols();
    const std::size_t n = transpose ? cost.cols() : cost.rows();
    const std::size_t m = transpose ? cost.rows() : cost.cols();
    auto orig = [&](std::size_t i, std::size_t j) {
        return transpose ? std::pair{j, i} : std::pair{i, j};
    };

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    Matrix<unsigned char> blocked(n, m, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const auto [r, c] = orig(i, j);
            if (is_forbidden(cost, forbid, r, c)) {
                blocked(i, j) = 1;
                continue;
            }
            lo = std::min(lo, cost(r, c));
            hi = std::max(hi, cost(r, c));
        }
    }
    if (lo > hi) return result;  // nothing assignable

    // A forbidden cell costs more than any full set of allowed cells, so the
    // optimum first maximizes the number of allowed pairs.
    const double span = hi - lo;
    const double big = span * static_cast<double>(n) + 1.0;
    Matrix<double> a(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const auto [r, c] = orig(i, j);
            a(i, j) = blocked(i, j) ? span + big : cost(r, c) - lo;
        }
    }

    const auto row_to_col = hungarian(a);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = row_to_col[i];
        if (blocked(i, j)) continue;
        result.pairs.push_back(orig(i, j));
    }
    std::sort(result.pairs.begin(), result.pairs.end());
    for (const auto& [r, c] : result.pairs) result.total_cost += cost(r, c);
    return result;
}

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

AssignmentResult solve_assignment(const CostMatrix& cost) { return solve_impl(cost, nullptr); }

AssignmentResult solve_assignment(const CostMatrix& cost, const ForbidMask& forbid) {
    return solve_impl(cost, &forbid);
}

AssignmentResult solve_assignment_blockwise(const CostMatrix& cost, const ForbidMask& forbid) {
    if (forbid.rows() != cost.rows() || forbid.cols() != cost.cols()) {
        throw std::invalid_argument("forbid mask shape does not match cost matrix");
    }
    const std::size_t rows = cost.rows();
    const std::size_t cols = cost.cols();
    AssignmentResult result;
    if (cost.empty()) return result;

    // Nodes 0..rows-1 are rows, rows..rows+cols-1 are columns.
    DisjointSets sets(rows + cols);
    std::vector<char> has_edge(rows + cols, 0);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (is_forbidden(cost, &forbid, r, c)) continue;
            sets.unite(r, rows + c);
            has_edge[r] = has_edge[rows + c] = 1;
        }
    }

    std::vector<std::vector<std::size_t>> comp_rows(rows + cols), comp_cols(rows + cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (has_edge[r]) comp_rows[sets.find(r)].push_back(r);
    }
    for (std::size_t c = 0; c < cols; ++c) {
        if (has_edge[rows + c]) comp_cols[sets.find(rows + c)].push_back(c);
    }

    for (std::size_t root = 0; root < rows + cols; ++root) {
        const auto& rs = comp_rows[root];
        const auto& cs = comp_cols[root];
        if (rs.empty() || cs.empty()) continue;
        CostMatrix sub(rs.size(), cs.size());
        ForbidMask sub_forbid(rs.size(), cs.size(), 0);
        for (std::size_t i = 0; i < rs.size(); ++i) {
            for (std::size_t j = 0; j < cs.size(); ++j) {
                sub(i, j) = cost(rs[i], cs[j]);
                sub_forbid(i, j) = forbid(rs[i], cs[j]);
            }
        }
        for (const auto& [i, j] : solve_impl(sub, &sub_forbid).pairs) {
            result.pairs.emplace_back(rs[i], cs[j]);
        }
    }
    std::sort(result.pairs.begin(), result.pairs.end());
    for (const auto& [r, c] : result.pairs) result.total_cost += cost(r, c);
    return result;
}

}  // namespace pitchtrack
