#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ntci/assignment.hpp"
#include "ntci/errors.hpp"
#include "ntci/metrics.hpp"

namespace ntci {

/// Largest sample count accepted by the exact assignment route.
inline constexpr int kMaxExactAssignment = 512;

/// W2 distance between the two empirical path measures: the square root of
/// the optimal matching of squared path distances. Exact (no regularization);
/// capped at kMaxExactAssignment samples, subsample above that.
inline double empirical_w2(std::span<const SegmentPath> p_samples,
                           std::span<const SegmentPath> q_samples, PathMetricKind kind) {
    if (p_samples.size() != q_samples.size())
        throw domain_error("empirical_w2: sample counts must match");
    if (p_samples.empty()) throw domain_error("empirical_w2: empty sample");
    const int n = static_cast<int>(p_samples.size());
    if (n > kMaxExactAssignment)
        throw domain_error("empirical_w2: n = " + std::to_string(n) + " exceeds the exact cap " +
                           std::to_string(kMaxExactAssignment) + "; subsample first");

    std::vector<double> cost(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            cost[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
                 static_cast<std::size_t>(j)] =
                distance_sq(p_samples[static_cast<std::size_t>(i)],
                            q_samples[static_cast<std::size_t>(j)], kind);

    const AssignmentResult match = solve_assignment(cost, n);
    return std::sqrt(match.cost / static_cast<double>(n));
}

}  // namespace ntci
