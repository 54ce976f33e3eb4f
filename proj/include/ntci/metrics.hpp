#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "ntci/errors.hpp"
#include "ntci/path.hpp"

namespace ntci {

/// The three path-space metrics on C([0,T]; R^n). Suprema are taken over
/// grid nodes and the time integral is a composite trapezoid on the grid;
/// the discretization error is absorbed into Monte Carlo tolerances.
enum class PathMetricKind {
    SumSupSquares,  // d_inf1: sqrt(sum_k sup_{[k,k+1]} |a-b|^2), integer horizon only
    UniformSup,     // d_inf2: sup_{[0,T]} |a-b|
    L2InTime,       // d_l2:   sqrt(int_0^T |a-b|^2 dt)
};

inline const char* metric_name(PathMetricKind kind) {
    switch (kind) {
        case PathMetricKind::SumSupSquares: return "d_inf1";
        case PathMetricKind::UniformSup: return "d_inf2";
        case PathMetricKind::L2InTime: return "d_l2";
    }
    return "?";
}

namespace detail {

inline double node_dist_sq(const SegmentPath& a, const SegmentPath& b, std::int64_t node) {
    double s = 0.0;
    for (int c = 0; c < a.dim(); ++c) {
        const double d = a.value(node, c) - b.value(node, c);
        s += d * d;
    }
    return s;
}

}  // namespace detail

/// Squared distance between two paths over [0, T] (the initial segment on
/// [-tau, 0) is excluded).
inline double distance_sq(const SegmentPath& a, const SegmentPath& b, PathMetricKind kind) {
    if (a.grid() != b.grid() || a.dim() != b.dim())
        throw shape_error("distance: paths must share grid and dimension");
    const TimeGrid& g = a.grid();
    const std::int64_t i0 = g.zero_index();
    const std::int64_t i1 = g.node_count() - 1;

    switch (kind) {
        case PathMetricKind::UniformSup: {
            double best = 0.0;
            for (std::int64_t i = i0; i <= i1; ++i)
                best = std::max(best, detail::node_dist_sq(a, b, i));
            return best;
        }
        case PathMetricKind::L2InTime: {
            // composite trapezoid of |a-b|^2
            double acc = 0.5 * (detail::node_dist_sq(a, b, i0) + detail::node_dist_sq(a, b, i1));
            for (std::int64_t i = i0 + 1; i < i1; ++i) acc += detail::node_dist_sq(a, b, i);
            return acc * g.dt();
        }
        case PathMetricKind::SumSupSquares: {
            const std::int64_t big_n = g.integer_horizon();  // throws unless aligned integer T
            const std::int64_t per_unit = g.horizon_steps() / big_n;
            double acc = 0.0;
            for (std::int64_t k = 0; k < big_n; ++k) {
                double best = 0.0;
                for (std::int64_t i = i0 + k * per_unit; i <= i0 + (k + 1) * per_unit; ++i)
                    best = std::max(best, detail::node_dist_sq(a, b, i));
                acc += best;
            }
            return acc;
        }
    }
    throw domain_error("distance: unknown metric kind");
}

inline double distance(const SegmentPath& a, const SegmentPath& b, PathMetricKind kind) {
    return std::sqrt(distance_sq(a, b, kind));
}

}  // namespace ntci
