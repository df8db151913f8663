#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "oracles.hpp"
#include "pitchtrack/assignment.hpp"
#include "pitchtrack/box.hpp"
#include "pitchtrack/rng.hpp"

using namespace pitchtrack;

namespace {

CostMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
    CostMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

using Pairs = std::vector<std::pair<std::size_t, std::size_t>>;

}  // namespace

TEST(Iou, IdenticalBoxes) {
    const BoundingBox a{3, 4, 10, 20};
    EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
}

TEST(Iou, DisjointBoxes) { EXPECT_EQ(iou({0, 0, 2, 2}, {10, 10, 2, 2}), 0.0); }

TEST(Iou, HalfOverlap) { EXPECT_NEAR(iou({0, 0, 2, 2}, {1, 0, 2, 2}), 1.0 / 3.0, 1e-12); }

TEST(Iou, EdgeTouchingIsZero) { EXPECT_EQ(iou({0, 0, 2, 2}, {2, 0, 2, 2}), 0.0); }

TEST(Iou, SymmetricAndBounded) {
    Rng rng(5);
    for (int i = 0; i < 2000; ++i) {
        const BoundingBox a{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0.1, 6), rng.uniform(0.1, 6)};
        const BoundingBox b{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0.1, 6), rng.uniform(0.1, 6)};
        const double v = iou(a, b);
        EXPECT_EQ(v, iou(b, a));
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Box, Validity) {
    EXPECT_TRUE((BoundingBox{0, 0, 1, 1}.valid()));
    EXPECT_FALSE((BoundingBox{0, 0, 0, 1}.valid()));
    EXPECT_FALSE((BoundingBox{0, 0, 1, -1}.valid()));
    EXPECT_FALSE((BoundingBox{std::nan(""), 0, 1, 1}.valid()));
}

TEST(Box, NormalizeRejectsZero) {
    Embedding zero(4, 0.0);
    EXPECT_THROW(normalize(zero), std::invalid_argument);
    Embedding v{3.0, 4.0};
    normalize(v);
    EXPECT_NEAR(v[0], 0.6, 1e-12);
    EXPECT_NEAR(v[1], 0.8, 1e-12);
}

TEST(Assignment, TwoByTwo) {
    const auto r = solve_assignment(to_matrix({{1, 2}, {2, 1}}));
    EXPECT_EQ(r.pairs, (Pairs{{0, 0}, {1, 1}}));
    EXPECT_DOUBLE_EQ(r.total_cost, 2.0);
}

TEST(Assignment, OneByOne) {
    const auto r = solve_assignment(to_matrix({{5}}));
    EXPECT_EQ(r.pairs, (Pairs{{0, 0}}));
    EXPECT_DOUBLE_EQ(r.total_cost, 5.0);
}

TEST(Assignment, ThreeByThree) {
    const auto r = solve_assignment(to_matrix({{4, 1, 3}, {2, 0, 5}, {3, 2, 2}}));
    EXPECT_EQ(r.pairs, (Pairs{{0, 1}, {1, 0}, {2, 2}}));
    EXPECT_DOUBLE_EQ(r.total_cost, 5.0);
}

TEST(Assignment, EmptyMatrix) {
    EXPECT_TRUE(solve_assignment(CostMatrix{}).pairs.empty());
    EXPECT_TRUE(solve_assignment(CostMatrix(0, 3)).pairs.empty());
}

TEST(Assignment, RectangularBothWays) {
    const auto wide = solve_assignment(to_matrix({{9, 1, 8}, {1, 9, 8}}));
    EXPECT_EQ(wide.pairs, (Pairs{{0, 1}, {1, 0}}));
    const auto tall = solve_assignment(to_matrix({{9, 1}, {1, 9}, {0, 0}}));
    EXPECT_EQ(tall.pairs.size(), 2u);
    EXPECT_DOUBLE_EQ(tall.total_cost, 1.0);
}

TEST(Assignment, ForbiddenCellsNeverAssigned) {
    ForbidMask forbid(2, 2, 0);
    forbid(0, 0) = 1;
    const auto r = solve_assignment(to_matrix({{0, 10}, {10, 0}}), forbid);
    EXPECT_EQ(r.pairs, (Pairs{{0, 1}, {1, 0}}));
    EXPECT_DOUBLE_EQ(r.total_cost, 20.0);
}

TEST(Assignment, MaximumFeasibleMatching) {
    // Row 1 can only take column 0, so row 0 must give it up.
    ForbidMask forbid(3, 2, 0);
    forbid(1, 1) = 1;
    forbid(2, 0) = 1;
    forbid(2, 1) = 1;
    const auto r = solve_assignment(to_matrix({{1, 5}, {3, 0}, {0, 0}}), forbid);
    EXPECT_EQ(r.pairs, (Pairs{{0, 1}, {1, 0}}));
    EXPECT_DOUBLE_EQ(r.total_cost, 8.0);
}

TEST(Assignment, InfiniteMeansForbidden) {
    const double inf = std::numeric_limits<double>::infinity();
    const auto r = solve_assignment(to_matrix({{inf, inf}, {1, inf}}));
    EXPECT_EQ(r.pairs, (Pairs{{1, 0}}));
}

TEST(Assignment, NanThrows) { EXPECT_THROW(solve_assignment(to_matrix({{std::nan("")}})), std::invalid_argument); }

TEST(Assignment, MaskShapeChecked) {
    EXPECT_THROW(solve_assignment(to_matrix({{1, 2}}), ForbidMask(2, 2)), std::invalid_argument);
}

TEST(Assignment, MatchesBruteForceOnRealCosts) {
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t rows = 1 + rng.below(7);
        const std::size_t cols = 1 + rng.below(7);
        std::vector<std::vector<double>> c(rows, std::vector<double>(cols));
        for (auto& row : c) {
            for (double& v : row) v = rng.uniform(-3.0, 10.0);
        }
        const auto r = solve_assignment(to_matrix(c));
        EXPECT_EQ(r.pairs.size(), std::min(rows, cols));
        EXPECT_NEAR(r.total_cost, oracle::min_assignment_cost(c), 1e-9);
        double sum = 0.0;
        for (const auto& [i, j] : r.pairs) sum += c[i][j];
        EXPECT_NEAR(r.total_cost, sum, 1e-9);
    }
}

TEST(Assignment, StableUnderConstantShift) {
    Rng rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(6);
        CostMatrix a(n, n), b(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) = static_cast<double>(rng.below(1000)) / 7.0;
                b(i, j) = a(i, j) + 41.5;
            }
        }
        EXPECT_EQ(solve_assignment(a).pairs, solve_assignment(b).pairs);
    }
}

TEST(Assignment, BlockwiseAgreesWithDense) {
    Rng rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t rows = 1 + rng.below(9);
        const std::size_t cols = 1 + rng.below(9);
        CostMatrix c(rows, cols);
        ForbidMask f(rows, cols);
        for (std::size_t i = 0; i < rows; ++i) {
            for (std::size_t j = 0; j < cols; ++j) {
                c(i, j) = rng.uniform(0.0, 1.0);
                f(i, j) = rng.bernoulli(0.7) ? 1 : 0;
            }
        }
        const auto dense = solve_assignment(c, f);
        const auto block = solve_assignment_blockwise(c, f);
        EXPECT_EQ(dense.pairs.size(), block.pairs.size());
        EXPECT_NEAR(dense.total_cost, block.total_cost, 1e-9);
        for (const auto& [i, j] : block.pairs) EXPECT_EQ(f(i, j), 0);
    }
}

TEST(Assignment, DeterministicTies) {
    const auto r = solve_assignment(to_matrix({{1, 1}, {1, 1}}));
    EXPECT_EQ(r.pairs, (Pairs{{0, 0}, {1, 1}}));
}
