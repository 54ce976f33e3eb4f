#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "ntci/errors.hpp"
#include "ntci/metrics.hpp"
#include "ntci/simulate.hpp"

namespace ntci {

/// Per-trajectory reduction of a coupled run: energy plus the squared
/// distance under each requested metric.
struct SampleSummary {
    std::uint64_t stream_id = 0;
    double energy = 0.0;
    std::optional<double> d_inf1_sq;
    std::optional<double> d_inf2_sq;
    std::optional<double> d_l2_sq;

    std::optional<double> metric_sq(PathMetricKind kind) const {
        switch (kind) {
            case PathMetricKind::SumSupSquares: return d_inf1_sq;
            case PathMetricKind::UniformSup: return d_inf2_sq;
            case PathMetricKind::L2InTime: return d_l2_sq;
        }
        return std::nullopt;
    }
};

struct EnsembleJob {
    NeutralModel model;
    Segment xi;
    Perturbation perturbation;
    TimeGrid grid;
    std::vector<PathMetricKind> metrics;
    SimOptions sim{};
};

struct EnsembleResult {
    std::vector<SampleSummary> samples;  // indexed by stream_id, ascending
    std::vector<SegmentPath> kept_x;     // first keep_paths trajectories
    std::vector<SegmentPath> kept_y;
};

using CoupledSampler = std::function<CoupledSample(std::uint64_t)>;

/// Generic driver: runs sampler(stream_id) for stream_id = 0..n_paths-1 and
/// reduces into slot-indexed summaries. Because every slot is written
/// exactly once and the sampler is a pure function of the stream id, the
/// result is byte-identical for every worker count.
inline EnsembleResult run_coupled_ensemble(const CoupledSampler& sampler,
                                           const std::vector<PathMetricKind>& metrics,
                                           std::int64_t n_paths, int workers,
                                           std::int64_t keep_paths = 0) {
    if (n_paths < 1) throw domain_error("run_ensemble: n_paths must be >= 1");
    if (workers < 1) workers = 1;
    keep_paths = std::min(keep_paths, n_paths);

    std::vector<SampleSummary> samples(static_cast<std::size_t>(n_paths));
    std::vector<std::optional<SegmentPath>> kept_x(static_cast<std::size_t>(keep_paths));
    std::vector<std::optional<SegmentPath>> kept_y(static_cast<std::size_t>(keep_paths));

    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex fail_mutex;
    std::int64_t failing_stream = -1;
    std::exception_ptr failure;

    auto worker_fn = [&]() {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n_paths) return;
            try {
                CoupledSample sample = sampler(static_cast<std::uint64_t>(i));
                SampleSummary& slot = samples[static_cast<std::size_t>(i)];
                slot.stream_id = static_cast<std::uint64_t>(i);
                slot.energy = sample.energy;
                for (PathMetricKind kind : metrics) {
                    const double d2 = distance_sq(sample.x, sample.y, kind);
                    switch (kind) {
                        case PathMetricKind::SumSupSquares: slot.d_inf1_sq = d2; break;
                        case PathMetricKind::UniformSup: slot.d_inf2_sq = d2; break;
                        case PathMetricKind::L2InTime: slot.d_l2_sq = d2; break;
                    }
                }
                if (i < keep_paths) {
                    kept_x[static_cast<std::size_t>(i)] = std::move(sample.x);
                    kept_y[static_cast<std::size_t>(i)] = std::move(sample.y);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(fail_mutex);
                if (failing_stream < 0 || i < failing_stream) {
                    failing_stream = i;
                    failure = std::current_exception();
                }
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    if (workers == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker_fn);
        for (auto& t : pool) t.join();
    }

    if (failed.load()) {
        try {
            std::rethrow_exception(failure);
        } catch (const std::exception& e) {
            throw config_error("run_ensemble: trajectory " + std::to_string(failing_stream) +
                               " failed: " + e.what());
        }
    }

    EnsembleResult result;
    result.samples = std::move(samples);
    result.kept_x.reserve(static_cast<std::size_t>(keep_paths));
    result.kept_y.reserve(static_cast<std::size_t>(keep_paths));
    for (std::int64_t i = 0; i < keep_paths; ++i) {
        result.kept_x.push_back(std::move(*kept_x[static_cast<std::size_t>(i)]));
        result.kept_y.push_back(std::move(*kept_y[static_cast<std::size_t>(i)]));
    }
    return result;
}

/// Coupled ensemble for one neutral-SDE job; trajectory i uses stream_id i.
inline EnsembleResult run_ensemble(const EnsembleJob& job, std::int64_t n_paths,
                                   std::uint64_t seed, int workers, std::int64_t keep_paths = 0) {
    auto sampler = [&job, seed](std::uint64_t stream) {
        NoisePlan noise(seed, stream, job.model.noise_dim, job.grid.dt());
        return simulate_coupled(job.model, job.xi, job.perturbation, job.grid, noise, job.sim);
    };
    return run_coupled_ensemble(sampler, job.metrics, n_paths, workers, keep_paths);
}

}  // namespace ntci
