#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "ntci/errors.hpp"

namespace ntci {

struct AssignmentResult {
    std::vector<int> col_of_row;  // optimal column for each row
    double cost = 0.0;
};

/// Exact minimum-cost perfect matching on a square cost matrix (row-major),
/// by shortest augmenting paths with dual potentials (the Jonker-Volgenant
/// scheme). O(n^3); no tolerance knobs, the optimum is exact in floating
/// point for the reduced costs encountered.
inline AssignmentResult solve_assignment(std::span<const double> cost, int n) {
    if (n < 1) throw domain_error("solve_assignment: n must be >= 1");
    if (cost.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw shape_error("solve_assignment: cost matrix must be n*n");
    constexpr double kInf = std::numeric_limits<double>::infinity();

    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    std::vector<double> shortest(static_cast<std::size_t>(n), 0.0);
    std::vector<int> col4row(static_cast<std::size_t>(n), -1);
    std::vector<int> row4col(static_cast<std::size_t>(n), -1);
    std::vector<int> path(static_cast<std::size_t>(n), -1);
    std::vector<int> remaining(static_cast<std::size_t>(n), 0);
    std::vector<char> scanned_row(static_cast<std::size_t>(n), 0);
    std::vector<char> scanned_col(static_cast<std::size_t>(n), 0);

    for (int cur_row = 0; cur_row < n; ++cur_row) {
        std::fill(shortest.begin(), shortest.end(), kInf);
        std::fill(scanned_row.begin(), scanned_row.end(), 0);
        std::fill(scanned_col.begin(), scanned_col.end(), 0);
        int num_remaining = n;
        for (int j = 0; j < n; ++j) remaining[static_cast<std::size_t>(j)] = j;

        double min_val = 0.0;
        int sink = -1;
        int i = cur_row;
        while (sink == -1) {
            scanned_row[static_cast<std::size_t>(i)] = 1;
            int index = -1;
            double lowest = kInf;
            for (int it = 0; it < num_remaining; ++it) {
                const int j = remaining[static_cast<std::size_t>(it)];
                const double r = min_val +
                                 cost[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                                      static_cast<std::size_t>(j)] -
                                 u[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(j)];
                if (r < shortest[static_cast<std::size_t>(j)]) {
                    path[static_cast<std::size_t>(j)] = i;
                    shortest[static_cast<std::size_t>(j)] = r;
                }
                if (shortest[static_cast<std::size_t>(j)] < lowest ||
                    (shortest[static_cast<std::size_t>(j)] == lowest &&
                     row4col[static_cast<std::size_t>(j)] == -1)) {
                    lowest = shortest[static_cast<std::size_t>(j)];
                    index = it;
                }
            }
            min_val = lowest;
            if (!(min_val < kInf))
                throw domain_error("solve_assignment: infeasible cost matrix");
            const int j = remaining[static_cast<std::size_t>(index)];
            if (row4col[static_cast<std::size_t>(j)] == -1) {
                sink = j;
            } else {
                i = row4col[static_cast<std::size_t>(j)];
            }
            scanned_col[static_cast<std::size_t>(j)] = 1;
            remaining[static_cast<std::size_t>(index)] =
                remaining[static_cast<std::size_t>(--num_remaining)];
        }

        u[static_cast<std::size_t>(cur_row)] += min_val;
        for (int ip = 0; ip < n; ++ip) {
            if (scanned_row[static_cast<std::size_t>(ip)] && ip != cur_row) {
                u[static_cast<std::size_t>(ip)] +=
                    min_val -
                    shortest[static_cast<std::size_t>(col4row[static_cast<std::size_t>(ip)])];
            }
        }
        for (int jp = 0; jp < n; ++jp) {
            if (scanned_col[static_cast<std::size_t>(jp)])
                v[static_cast<std::size_t>(jp)] -= min_val - shortest[static_cast<std::size_t>(jp)];
        }

        int j = sink;
        while (true) {
            const int ii = path[static_cast<std::size_t>(j)];
            row4col[static_cast<std::size_t>(j)] = ii;
            std::swap(col4row[static_cast<std::size_t>(ii)], j);
            if (ii == cur_row) break;
        }
    }

    AssignmentResult result;
    result.col_of_row = std::move(col4row);
    for (int r = 0; r < n; ++r)
        result.cost += cost[static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
                            static_cast<std::size_t>(result.col_of_row[static_cast<std::size_t>(r)])];
    return result;
}

}  // namespace ntci
