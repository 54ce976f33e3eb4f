#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "ntci/errors.hpp"

namespace ntci {

/// Uniform time grid over [-tau, horizon]. The step is stored as tau/m, so
/// the delay boundary -tau is always a grid node and segment lookups at
/// theta = -tau never interpolate.
class TimeGrid {
public:
    /// tau > 0, horizon > 0; dt must divide both within 1e-9 relative slack
    /// (the stored step is canonicalized to tau / round(tau/dt)).
    TimeGrid(double tau, double horizon, double dt) {
        if (!(tau > 0.0)) throw domain_error("TimeGrid: tau must be > 0");
        if (!(horizon > 0.0)) throw domain_error("TimeGrid: horizon must be > 0");
        if (!(dt > 0.0)) throw domain_error("TimeGrid: dt must be > 0");
        const double m_real = tau / dt;
        m_ = static_cast<std::int64_t>(std::llround(m_real));
        if (m_ < 1 || std::abs(m_real - static_cast<double>(m_)) > 1e-9 * std::max(1.0, m_real)) {
            throw domain_error("TimeGrid: dt must divide tau exactly (tau=" + std::to_string(tau) +
                               ", dt=" + std::to_string(dt) + ")");
        }
        dt_ = tau / static_cast<double>(m_);
        tau_ = tau;
        const double n_real = horizon / dt_;
        horizon_steps_ = static_cast<std::int64_t>(std::llround(n_real));
        if (horizon_steps_ < 1 ||
            std::abs(n_real - static_cast<double>(horizon_steps_)) > 1e-9 * std::max(1.0, n_real)) {
            throw domain_error("TimeGrid: horizon must be an integer multiple of dt");
        }
        horizon_ = static_cast<double>(horizon_steps_) * dt_;
    }

    double tau() const { return tau_; }
    double horizon() const { return horizon_; }
    double dt() const { return dt_; }

    /// Steps per delay window (tau / dt).
    std::int64_t delay_steps() const { return m_; }
    /// Steps over [0, horizon].
    std::int64_t horizon_steps() const { return horizon_steps_; }
    /// Total node count over [-tau, horizon].
    std::int64_t node_count() const { return m_ + horizon_steps_ + 1; }

    /// t_i = -tau + i*dt for i in [0, node_count).
    double time_at(std::int64_t i) const { return -tau_ + static_cast<double>(i) * dt_; }

    /// Node index of time 0.
    std::int64_t zero_index() const { return m_; }

    /// True if the horizon is (numerically) the integer N and every unit
    /// boundary k = 0..N lands on a grid node; required by the d_inf1 metric.
    bool has_unit_partition() const {
        const double n = horizon_;
        const std::int64_t N = static_cast<std::int64_t>(std::llround(n));
        if (N < 1 || std::abs(n - static_cast<double>(N)) > 1e-9) return false;
        return horizon_steps_ % N == 0;
    }

    std::int64_t integer_horizon() const {
        if (!has_unit_partition())
            throw config_error("TimeGrid: horizon is not a positive integer aligned with the grid");
        return static_cast<std::int64_t>(std::llround(horizon_));
    }

    bool operator==(const TimeGrid& other) const {
        return m_ == other.m_ && horizon_steps_ == other.horizon_steps_ && dt_ == other.dt_;
    }
    bool operator!=(const TimeGrid& other) const { return !(*this == other); }

private:
    double tau_ = 0.0;
    double horizon_ = 0.0;
    double dt_ = 0.0;
    std::int64_t m_ = 0;
    std::int64_t horizon_steps_ = 0;
};

}  // namespace ntci
