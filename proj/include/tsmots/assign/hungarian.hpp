#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "tsmots/core/error.hpp"

namespace tsmots {

/// Forbidden pair marker for assignment costs.
inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

/// Dense rectangular cost matrix, row-major.
class CostMatrix {
public:
    CostMatrix() = default;
    CostMatrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

/// Partial one-to-one assignment; row_to_col[r] == -1 means row r unassigned.
struct Assignment {
    std::vector<int> row_to_col;
    double total_cost = 0.0;
    int matched = 0;
};

namespace detail {

// Minimum-cost assignment with forbidden (infinite) pairs: maximizes the
// number of assigned pairs over finite entries, then minimizes their total
// cost. Solved on a (rows+cols) square padding where every row and column
// owns a skip slot priced so one extra real match always beats a skip.
// Deterministic: ties in the augmenting search resolve to the lowest column
// index. O((rows+cols)^3).
inline Assignment solve_assignment(const CostMatrix& cost) {
    const int R = cost.rows();
    const int C = cost.cols();
    Assignment result;
    result.row_to_col.assign(R, -1);
    if (R == 0 || C == 0) return result;

    double lo = kInfiniteCost, hi = -kInfiniteCost;
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c) {
            const double v = cost.at(r, c);
            if (v < kInfiniteCost) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    if (lo > hi) return result; // every pair forbidden

    const double range = hi - lo;
    const double skip_price = range * std::min(R, C) + 1.0;

    const int s = R + C;
    auto padded = [&](int i, int j) -> double {
        if (i < R && j < C) {
            const double v = cost.at(i, j);
            return v < kInfiniteCost ? v - lo : kInfiniteCost;
        }
        if (i < R) return j - C == i ? skip_price : kInfiniteCost;
        if (j < C) return i - R == j ? skip_price : kInfiniteCost;
        return 0.0;
    };

    // Shortest-augmenting-path Hungarian with potentials (1-based arrays).
    std::vector<double> u(s + 1, 0.0), v(s + 1, 0.0), minv(s + 1, 0.0);
    std::vector<int> p(s + 1, 0), way(s + 1, 0);
    std::vector<char> used(s + 1, 0);
    for (int i = 1; i <= s; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInfiniteCost);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = kInfiniteCost;
            int j1 = -1;
            for (int j = 1; j <= s; ++j) {
                if (used[j]) continue;
                const double c = padded(i0 - 1, j - 1);
                if (c < kInfiniteCost) {
                    const double cur = c - u[i0] - v[j];
                    if (cur < minv[j]) {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            if (j1 < 0)
                throw InvariantError("assignment: padded matrix lost feasibility");
            for (int j = 0; j <= s; ++j) {
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
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    for (int j = 0; j < C; ++j) {
        const int i = p[j + 1] - 1;
        if (i >= 0 && i < R && cost.at(i, j) < kInfiniteCost) {
            result.row_to_col[i] = j;
            result.total_cost += cost.at(i, j);
            ++result.matched;
        }
    }
    return result;
}

} // namespace detail

/// Minimum-total-cost one-to-one assignment. Infinite-cost pairs are never
/// assigned; rows whose pairs are all infinite stay unassigned, so an
/// all-infinite matrix yields an empty assignment. Among cost-equal optima
/// the result is canonical: row 0 gets the lowest feasible column, then
/// row 1, and so on (unassigned ranks after every column).
inline Assignment hungarian(const CostMatrix& cost) {
    const int R = cost.rows();
    const int C = cost.cols();
    const Assignment base = detail::solve_assignment(cost);
    if (base.matched == 0) return base;

    const double eps = 1e-9 * (1.0 + std::abs(base.total_cost));

    // Lower bound helper: cheapest finite entry per row.
    std::vector<double> row_min(R, kInfiniteCost);
    for (int r = 0; r < R; ++r)
        for (int c = 0; c < C; ++c)
            row_min[r] = std::min(row_min[r], cost.at(r, c));

    Assignment result;
    result.row_to_col.assign(R, -1);
    std::vector<char> col_taken(C, 0);
    std::vector<char> row_fixed(R, 0);
    double acc = 0.0;
    int fixed_matches = 0;

    // Re-solves the subproblem over non-fixed rows and free columns.
    auto solve_remaining = [&]() -> Assignment {
        std::vector<int> rows_left, cols_left;
        for (int r = 0; r < R; ++r)
            if (!row_fixed[r]) rows_left.push_back(r);
        for (int c = 0; c < C; ++c)
            if (!col_taken[c]) cols_left.push_back(c);
        CostMatrix sub(static_cast<int>(rows_left.size()), static_cast<int>(cols_left.size()));
        for (std::size_t i = 0; i < rows_left.size(); ++i)
            for (std::size_t j = 0; j < cols_left.size(); ++j)
                sub.at(static_cast<int>(i), static_cast<int>(j)) =
                    cost.at(rows_left[i], cols_left[j]);
        return detail::solve_assignment(sub);
    };

    for (int r = 0; r < R; ++r) {
        // Remaining rows contribute at least min(0, cheapest entry) each,
        // since any of them may also end up unassigned.
        double tail_bound = 0.0;
        for (int r2 = r + 1; r2 < R; ++r2)
            if (row_min[r2] < kInfiniteCost) tail_bound += std::min(row_min[r2], 0.0);

        int chosen = -1;
        for (int c = 0; c < C; ++c) {
            if (col_taken[c]) continue;
            const double rc = cost.at(r, c);
            if (!(rc < kInfiniteCost)) continue;
            if (acc + rc + tail_bound > base.total_cost + eps) continue;
            row_fixed[r] = 1;
            col_taken[c] = 1;
            const Assignment sub = solve_remaining();
            row_fixed[r] = 0;
            col_taken[c] = 0;
            if (fixed_matches + 1 + sub.matched == base.matched &&
                std::abs(acc + rc + sub.total_cost - base.total_cost) <= eps) {
                chosen = c;
                break;
            }
        }
        if (chosen >= 0) {
            result.row_to_col[r] = chosen;
            acc += cost.at(r, chosen);
            col_taken[chosen] = 1;
            ++fixed_matches;
        }
        row_fixed[r] = 1;
    }

    result.total_cost = acc;
    result.matched = fixed_matches;
    if (result.matched != base.matched)
        throw InvariantError("hungarian: canonicalization changed cardinality");
    return result;
}

} // namespace tsmots
