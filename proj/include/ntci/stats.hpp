#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ntci/ensemble.hpp"
#include "ntci/errors.hpp"

namespace ntci {

/// Sample mean with a 95% normal-approximation confidence halfwidth
/// (z = 1.96, Bessel-corrected standard deviation; halfwidth 0 for n < 2).
struct MeanCi {
    double mean = 0.0;
    double halfwidth = 0.0;
    std::int64_t n = 0;

    double lower() const { return mean - halfwidth; }
    double upper() const { return mean + halfwidth; }
};

inline MeanCi mean_ci(std::span<const double> values) {
    if (values.empty()) throw domain_error("mean_ci: empty sample");
    const auto n = static_cast<std::int64_t>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double halfwidth = 0.0;
    if (n >= 2) {
        double ss = 0.0;
        for (double v : values) {
            const double d = v - mean;
            ss += d * d;
        }
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        halfwidth = 1.96 * sd / std::sqrt(static_cast<double>(n));
    }
    return MeanCi{mean, halfwidth, n};
}

/// Relative entropy via the Girsanov energy identity: H = mean(energy) / 2.
inline MeanCi entropy_from_energies(std::span<const double> energies) {
    if (energies.empty()) throw domain_error("entropy_from_energies: empty sample");
    for (double e : energies) {
        if (e < 0.0) throw domain_error("entropy_from_energies: energies must be >= 0");
    }
    MeanCi ci = mean_ci(energies);
    ci.mean *= 0.5;
    ci.halfwidth *= 0.5;
    return ci;
}

/// Mean squared coupling distance E[d^2(X, Y)] under one metric.
inline MeanCi coupling_distance_sq(const std::vector<SampleSummary>& samples,
                                   PathMetricKind kind) {
    if (samples.empty()) throw domain_error("coupling_distance_sq: empty sample");
    std::vector<double> values;
    values.reserve(samples.size());
    for (const auto& s : samples) {
        const auto d2 = s.metric_sq(kind);
        if (!d2)
            throw domain_error("coupling_distance_sq: metric not recorded in the ensemble");
        values.push_back(*d2);
    }
    return mean_ci(values);
}

inline std::vector<double> energies_of(const std::vector<SampleSummary>& samples) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.energy);
    return out;
}

}  // namespace ntci
