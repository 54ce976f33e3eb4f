#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ntci/errors.hpp"
#include "ntci/grid.hpp"

namespace ntci {

/// Non-owning view of one history window: node j holds the state at
/// theta_j = -tau + j*dt, j = 0..m. Coefficient functionals (G, b, sigma)
/// receive this type. The endpoint (j = m, theta = 0) can be overridden
/// without touching the backing storage, which is how the neutral-relation
/// fixed point iterates on a candidate endpoint.
class SegmentRef {
public:
    SegmentRef(const double* base, int dim, std::int64_t m, double dt)
        : base_(base), dim_(dim), m_(m), dt_(dt) {}

    int dim() const { return dim_; }
    std::int64_t delay_steps() const { return m_; }
    double dt() const { return dt_; }
    double tau() const { return static_cast<double>(m_) * dt_; }

    /// State at node j (theta = -tau + j*dt), component c.
    double node(std::int64_t j, int c) const {
        if (endpoint_ != nullptr && j == m_) return endpoint_[c];
        return base_[j * dim_ + c];
    }

    /// Linear interpolation at theta in [-tau, 0].
    double eval(double theta, int c) const {
        const double pos = (theta + tau()) / dt_;
        if (pos <= 0.0) return node(0, c);
        if (pos >= static_cast<double>(m_)) return node(m_, c);
        const auto j = static_cast<std::int64_t>(pos);
        const double frac = pos - static_cast<double>(j);
        if (frac == 0.0) return node(j, c);
        return (1.0 - frac) * node(j, c) + frac * node(j + 1, c);
    }

    /// theta = 0 value.
    double endpoint(int c) const { return node(m_, c); }

    SegmentRef with_endpoint(const double* endpoint) const {
        SegmentRef out = *this;
        out.endpoint_ = endpoint;
        return out;
    }

    /// sup over nodes of the Euclidean norm (the segment uniform norm).
    double sup_norm() const {
        double best = 0.0;
        for (std::int64_t j = 0; j <= m_; ++j) {
            double s = 0.0;
            for (int c = 0; c < dim_; ++c) {
                const double v = node(j, c);
                s += v * v;
            }
            best = std::max(best, s);
        }
        return std::sqrt(best);
    }

private:
    const double* base_;
    int dim_;
    std::int64_t m_;
    double dt_;
    const double* endpoint_ = nullptr;
};

/// Owned history window on [-tau, 0]; used for initial conditions and for
/// the assumption-audit samplers.
class Segment {
public:
    Segment(double tau, std::int64_t m, int dim)
        : tau_(tau), m_(m), dim_(dim), values_(static_cast<std::size_t>((m + 1) * dim), 0.0) {
        if (!(tau > 0.0)) throw domain_error("Segment: tau must be > 0");
        if (m < 1) throw domain_error("Segment: need at least one delay step");
        if (dim < 1) throw domain_error("Segment: dim must be >= 1");
    }

    static Segment constant(double tau, std::int64_t m, std::span<const double> value) {
        Segment s(tau, m, static_cast<int>(value.size()));
        for (std::int64_t j = 0; j <= m; ++j)
            for (int c = 0; c < s.dim_; ++c) s.at(j, c) = value[static_cast<std::size_t>(c)];
        return s;
    }

    /// Fill from f(theta, component).
    static Segment from_function(double tau, std::int64_t m, int dim,
                                 const std::function<double(double, int)>& f) {
        Segment s(tau, m, dim);
        for (std::int64_t j = 0; j <= m; ++j) {
            const double theta = -tau + static_cast<double>(j) * s.dt();
            for (int c = 0; c < dim; ++c) s.at(j, c) = f(theta, c);
        }
        return s;
    }

    double tau() const { return tau_; }
    double dt() const { return tau_ / static_cast<double>(m_); }
    std::int64_t delay_steps() const { return m_; }
    int dim() const { return dim_; }

    double& at(std::int64_t j, int c) { return values_[static_cast<std::size_t>(j * dim_ + c)]; }
    double at(std::int64_t j, int c) const {
        return values_[static_cast<std::size_t>(j * dim_ + c)];
    }

    SegmentRef ref() const { return SegmentRef(values_.data(), dim_, m_, dt()); }

private:
    double tau_;
    std::int64_t m_;
    int dim_;
    std::vector<double> values_;
};

/// A trajectory on the full grid [-tau, horizon], stored at grid nodes;
/// immutable once built. segment_at(t) exposes the path-valued state X_t.
class SegmentPath {
public:
    SegmentPath(TimeGrid grid, int dim, std::vector<double> values)
        : grid_(grid), dim_(dim), values_(std::move(values)) {
        if (dim < 1) throw domain_error("SegmentPath: dim must be >= 1");
        if (values_.size() != static_cast<std::size_t>(grid_.node_count() * dim)) {
            throw shape_error("SegmentPath: value count does not match grid node count");
        }
    }

    const TimeGrid& grid() const { return grid_; }
    int dim() const { return dim_; }

    double value(std::int64_t node, int c) const {
        return values_[static_cast<std::size_t>(node * dim_ + c)];
    }

    std::span<const double> raw() const { return values_; }

    /// Pointwise evaluation at any t in [-tau, horizon], linear between nodes.
    double eval(double t, int c) const {
        const double pos = (t + grid_.tau()) / grid_.dt();
        const double last = static_cast<double>(grid_.node_count() - 1);
        if (pos < -1e-9 || pos > last + 1e-9)
            throw domain_error("SegmentPath::eval: t outside [-tau, horizon]");
        if (pos <= 0.0) return value(0, c);
        if (pos >= last) return value(grid_.node_count() - 1, c);
        const auto j = static_cast<std::int64_t>(pos);
        const double frac = pos - static_cast<double>(j);
        if (frac == 0.0) return value(j, c);
        return (1.0 - frac) * value(j, c) + frac * value(j + 1, c);
    }

    /// Segment view X_t for grid-aligned t in [0, horizon]. For t between
    /// nodes use segment_eval.
    SegmentRef segment_at_node(std::int64_t node) const {
        if (node < grid_.zero_index() || node >= grid_.node_count())
            throw domain_error("SegmentPath::segment_at_node: node before t=0 or past horizon");
        const std::int64_t start = node - grid_.delay_steps();
        return SegmentRef(values_.data() + start * dim_, dim_, grid_.delay_steps(), grid_.dt());
    }

    /// X_t(theta) for arbitrary t in [0, horizon], theta in [-tau, 0].
    double segment_eval(double t, double theta, int c) const {
        if (t < -1e-9 || t > grid_.horizon() + 1e-9)
            throw domain_error("SegmentPath::segment_eval: t outside [0, horizon]");
        if (theta < -grid_.tau() - 1e-9 || theta > 1e-9)
            throw domain_error("SegmentPath::segment_eval: theta outside [-tau, 0]");
        return eval(std::clamp(t + theta, -grid_.tau(), grid_.horizon()), c);
    }

private:
    TimeGrid grid_;
    int dim_;
    std::vector<double> values_;
};

}  // namespace ntci
