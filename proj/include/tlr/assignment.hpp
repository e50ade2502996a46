#pragma once

// Exact maximum-weight bipartite assignment (Hungarian algorithm with
// potentials, O(n^3)). Zero-weight pairs are excluded from the matching;
// ties between equal-weight optima are broken toward smaller secondary
// cost (date distance when provided), then earlier row and column indices.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "tlr/errors.hpp"

namespace tlr {

using Matrix = std::vector<std::vector<double>>;

namespace detail {

// Minimum-cost assignment on a square cost matrix; returns column assigned
// to each row.
inline std::vector<int> hungarian_min_cost(const Matrix& cost) {
    int n = static_cast<int>(cost.size());
    const double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<size_t>(n + 1), 0.0);
    std::vector<double> v(static_cast<size_t>(n + 1), 0.0);
    std::vector<int> p(static_cast<size_t>(n + 1), 0);
    std::vector<int> way(static_cast<size_t>(n + 1), 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<size_t>(n + 1), kInf);
        std::vector<char> used(static_cast<size_t>(n + 1), 0);
        do {
            used[static_cast<size_t>(j0)] = 1;
            int i0 = p[static_cast<size_t>(j0)];
            double delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) continue;
                double cur = cost[static_cast<size_t>(i0 - 1)][static_cast<size_t>(j - 1)] -
                             u[static_cast<size_t>(i0)] - v[static_cast<size_t>(j)];
                if (cur < minv[static_cast<size_t>(j)]) {
                    minv[static_cast<size_t>(j)] = cur;
                    way[static_cast<size_t>(j)] = j0;
                }
                if (minv[static_cast<size_t>(j)] < delta) {
                    delta = minv[static_cast<size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<size_t>(j)]) {
                    u[static_cast<size_t>(p[static_cast<size_t>(j)])] += delta;
                    v[static_cast<size_t>(j)] -= delta;
                } else {
                    minv[static_cast<size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<size_t>(j0)] != 0);
        do {
            int j1 = way[static_cast<size_t>(j0)];
            p[static_cast<size_t>(j0)] = p[static_cast<size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(static_cast<size_t>(n), -1);
    for (int j = 1; j <= n; ++j)
        if (p[static_cast<size_t>(j)] != 0)
            row_to_col[static_cast<size_t>(p[static_cast<size_t>(j)] - 1)] = j - 1;
    return row_to_col;
}

}  // namespace detail

// weights: p x r matrix of finite non-negative reals. Returns matched
// (row, col) pairs maximizing total weight; pairs with zero weight are
// dropped. `tiebreak` (same shape, e.g. date distances) steers the choice
// among equal-weight optima; pass an empty matrix for index-only ties.
inline std::vector<std::pair<int, int>> max_weight_assignment(
    const Matrix& weights, const Matrix& tiebreak = {}) {
    int p = static_cast<int>(weights.size());
    if (p == 0) return {};
    int r = static_cast<int>(weights[0].size());
    if (r == 0) return {};
    for (const auto& row : weights) {
        if (static_cast<int>(row.size()) != r) throw Error("ragged weight matrix");
        for (double w : row)
            if (!(w >= 0.0) || !std::isfinite(w))
                throw Error("weights must be finite and non-negative");
    }

    int n = std::max(p, r);
    // Primary objective scaled up so the secondary terms only decide ties.
    constexpr double kPrimaryScale = 1048576.0;  // 2^20
    Matrix cost(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < r; ++j) {
            double secondary = 0.0;
            if (!tiebreak.empty())
                secondary = 1.0 / (1.0 + tiebreak[static_cast<size_t>(i)][static_cast<size_t>(j)]);
            secondary += (static_cast<double>(p - i) / p) * 1e-4;
            secondary += (static_cast<double>(r - j) / r) * 1e-8;
            cost[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                -(weights[static_cast<size_t>(i)][static_cast<size_t>(j)] * kPrimaryScale +
                  secondary);
        }
    }
    std::vector<int> row_to_col = detail::hungarian_min_cost(cost);

    std::vector<std::pair<int, int>> matching;
    for (int i = 0; i < p; ++i) {
        int j = row_to_col[static_cast<size_t>(i)];
        if (j >= 0 && j < r &&
            weights[static_cast<size_t>(i)][static_cast<size_t>(j)] > 0.0)
            matching.emplace_back(i, j);
    }
    return matching;
}

inline double matching_weight(const Matrix& weights,
                              const std::vector<std::pair<int, int>>& matching) {
    double total = 0.0;
    for (const auto& [i, j] : matching)
        total += weights[static_cast<size_t>(i)][static_cast<size_t>(j)];
    return total;
}

}  // namespace tlr
