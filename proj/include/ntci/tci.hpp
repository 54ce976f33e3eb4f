#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "ntci/constants.hpp"
#include "ntci/ensemble.hpp"
#include "ntci/rng.hpp"
#include "ntci/stats.hpp"
#include "ntci/wasserstein.hpp"

namespace ntci {

struct TciOptions {
    int workers = 1;
    bool want_empirical = false;
    std::int64_t empirical_cap = kMaxExactAssignment;
    AssembleOptions assemble{};
    SimOptions sim{};
};

/// The numerical verdict on W2^2 <= 2*C*H for one perturbation: the Girsanov
/// entropy, the Monte Carlo coupling estimate, the assembled constant and,
/// optionally, an independent empirical Wasserstein cross-check.
struct TciVerdict {
    MeanCi entropy;
    MeanCi coupling_sq;
    ConstantsReport theoretical_c;
    double ratio = 0.0;  // coupling mean over 2*entropy mean
    std::optional<double> empirical_w2_value;
    std::optional<double> w2_null;   // same-law estimator error, W2(P-hat, P-hat')
    std::optional<double> w2_slack;  // estimator allowance for the cross-check
    bool empirical_consistent = true;
    bool pass = false;
};

/// Run the coupled ensemble, compute H and E[d^2], assemble C, and compare
/// with confidence-interval adjustment so Monte Carlo noise cannot produce a
/// spurious failure. When want_empirical is set, the perturbed trajectories
/// are matched against an independent unperturbed ensemble by exact optimal
/// assignment. The plug-in W2 estimator carries an O(n^{-1/d})-type excess
/// that the ensemble CI cannot see (shared noise can make the coupled
/// distance deterministic), so the cross-check is triangle-calibrated: a
/// same-law run measures the estimator's null error W2(P-hat, P-hat') and
/// the bound becomes emp_w2 <= sqrt(coupling upper) + null + dispersion.
inline TciVerdict verify_tci(const NeutralModel& model, const Segment& xi,
                             const Perturbation& pert, PathMetricKind metric,
                             const TimeGrid& grid, std::int64_t n_paths, std::uint64_t seed,
                             const TciOptions& options = {}) {
    EnsembleJob job{model, xi, pert, grid, {metric}, options.sim};
    const std::int64_t keep =
        options.want_empirical ? std::min<std::int64_t>(n_paths, options.empirical_cap) : 0;
    EnsembleResult ensemble = run_ensemble(job, n_paths, seed, options.workers, keep);

    TciVerdict verdict;
    const std::vector<double> energies = energies_of(ensemble.samples);
    verdict.entropy = entropy_from_energies(energies);
    verdict.coupling_sq = coupling_distance_sq(ensemble.samples, metric);
    verdict.theoretical_c = assemble_constants(model, metric, grid.horizon(), options.assemble);

    if (verdict.entropy.mean > 0.0) {
        verdict.ratio = verdict.coupling_sq.mean / (2.0 * verdict.entropy.mean);
    } else {
        verdict.ratio = verdict.coupling_sq.mean == 0.0
                            ? 0.0
                            : std::numeric_limits<double>::infinity();
    }

    const double c = verdict.theoretical_c.c_metric;
    verdict.pass = (verdict.entropy.mean == 0.0 && verdict.coupling_sq.mean == 0.0) ||
                   verdict.coupling_sq.upper() <= 2.0 * c * verdict.entropy.lower();

    if (options.want_empirical) {
        // Two independent unperturbed ensembles: the first is the transport
        // target, the pair measures the estimator's same-law error.
        EnsembleJob ref_job{model, xi, Perturbation::zero(), grid, {}, options.sim};
        EnsembleResult ref1 = run_ensemble(ref_job, keep, rng::derive_seed(seed, 1),
                                           options.workers, keep);
        EnsembleResult ref2 = run_ensemble(ref_job, keep, rng::derive_seed(seed, 2),
                                           options.workers, keep);

        verdict.empirical_w2_value = empirical_w2(ensemble.kept_x, ref1.kept_x, metric);
        verdict.w2_null = empirical_w2(ref1.kept_x, ref2.kept_x, metric);

        double half_spread = 0.0;
        if (keep >= 4) {
            std::vector<SegmentPath> pa, pb, qa, qb;
            for (std::int64_t i = 0; i < keep; ++i) {
                auto& px = ensemble.kept_x[static_cast<std::size_t>(i)];
                auto& qx = ref1.kept_x[static_cast<std::size_t>(i)];
                if (i % 2 == 0) {
                    pa.push_back(px);
                    qa.push_back(qx);
                } else {
                    pb.push_back(px);
                    qb.push_back(qx);
                }
            }
            const double wa = empirical_w2(pa, qa, metric);
            const double wb = empirical_w2(pb, qb, metric);
            half_spread = 0.5 * std::abs(wa * wa - wb * wb);
        }

        // triangle bound: W2(Q-hat, P-hat) <= W2(Q, P) + estimator errors,
        // with W2(Q, P)^2 <= coupling upper CI and the errors calibrated by
        // the same-law null
        const double base =
            std::sqrt(std::max(verdict.coupling_sq.upper(), 0.0)) + *verdict.w2_null;
        const double slack =
            base * base - verdict.coupling_sq.mean + 3.0 * half_spread;
        verdict.w2_slack = slack;
        const double w2_sq = *verdict.empirical_w2_value * *verdict.empirical_w2_value;
        verdict.empirical_consistent = w2_sq <= verdict.coupling_sq.mean + slack;
    }
    return verdict;
}

}  // namespace ntci
