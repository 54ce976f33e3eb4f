#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ntci/errors.hpp"
#include "ntci/model.hpp"
#include "ntci/path.hpp"
#include "ntci/rng.hpp"

namespace ntci {

/// Worst observed LHS/RHS ratio for one structural hypothesis. The ratio is
/// sign-safe: it is <= 1 exactly when LHS <= RHS, so a worst ratio <= 1+tol
/// means no sampled pair falsified the inequality.
struct ConditionResult {
    std::string name;
    double worst_ratio = 0.0;
    std::int64_t samples = 0;
    std::string worst_pair;
    bool pass = true;
};

struct AuditReport {
    std::vector<ConditionResult> conditions;
    bool pass = true;

    const ConditionResult& find(const std::string& name) const {
        for (const auto& c : conditions)
            if (c.name == name) return c;
        throw domain_error("AuditReport: unknown condition " + name);
    }
};

using SegmentPairSampler = std::function<std::pair<Segment, Segment>(std::int64_t)>;

/// Default sampler: piecewise-linear segments with node values uniform in
/// [-box, box], interleaved with the structured pairs (xi, 0) and
/// (xi, xi + eps*e_c) that probe local Lipschitz behaviour.
class DefaultPairSampler {
public:
    DefaultPairSampler(double tau, std::int64_t m, int dim, std::uint64_t seed, double box = 2.0)
        : tau_(tau), m_(m), dim_(dim), seed_(seed), box_(box) {}

    std::pair<Segment, Segment> operator()(std::int64_t index) const {
        Segment xi = draw(index, 0);
        const int kind = static_cast<int>(index % 3);
        if (kind == 1) {
            Segment zero(tau_, m_, dim_);
            return {std::move(xi), std::move(zero)};
        }
        if (kind == 2) {
            Segment eta = xi;
            const int c = static_cast<int>((index / 3) % dim_);
            const double eps = 1e-3 * box_;
            for (std::int64_t j = 0; j <= m_; ++j) eta.at(j, c) += eps;
            return {std::move(xi), std::move(eta)};
        }
        return {std::move(xi), draw(index, 1)};
    }

private:
    double uniform(std::int64_t index, int which, std::int64_t node, int comp) const {
        const auto out = rng::philox4x32(
            {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(node),
             static_cast<std::uint32_t>((comp << 1) | which), 0x61756474u},
            {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
        const std::uint64_t bits =
            (static_cast<std::uint64_t>(out.words[0]) << 32) | out.words[1];
        return rng::uniform_closed_open(bits);
    }

    Segment draw(std::int64_t index, int which) const {
        Segment s(tau_, m_, dim_);
        for (std::int64_t j = 0; j <= m_; ++j)
            for (int c = 0; c < dim_; ++c)
                s.at(j, c) = box_ * (2.0 * uniform(index, which, j, c) - 1.0);
        return s;
    }

    double tau_;
    std::int64_t m_;
    int dim_;
    std::uint64_t seed_;
    double box_;
};

namespace detail {

inline double ratio_of(double lhs, double rhs) {
    if (rhs > 0.0) return std::max(lhs, 0.0) / rhs;
    if (rhs == 0.0) {
        return lhs <= 1e-14 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    // rhs < 0: satisfied only if lhs <= rhs < 0
    if (lhs < 0.0) return rhs / lhs;
    return std::numeric_limits<double>::infinity();
}

inline void track(ConditionResult& cond, double lhs, double rhs, std::int64_t index) {
    const double r = ratio_of(lhs, rhs);
    ++cond.samples;
    if (cond.samples == 1 || r > cond.worst_ratio) {
        cond.worst_ratio = r;
        cond.worst_pair = "pair#" + std::to_string(index);
    }
}

struct PairEval {
    std::vector<double> g_xi, g_eta, b_xi, b_eta, s_xi, s_eta;
    double diff_sq_unweighted = 0.0;  // int |xi - eta|^2 dtheta (trapezoid)
    double xi_sq_unweighted = 0.0;    // int |xi|^2 dtheta
    double sup_diff_sq = 0.0;         // ||xi - eta||_inf^2
    double sup_xi_sq = 0.0;           // ||xi||_inf^2
};

inline PairEval evaluate_pair(const NeutralModel& model, const SegmentRef& xi,
                              const SegmentRef& eta) {
    PairEval ev;
    const auto n = static_cast<std::size_t>(model.dim);
    const auto nm = static_cast<std::size_t>(model.dim * model.noise_dim);
    ev.g_xi.assign(n, 0.0);
    ev.g_eta.assign(n, 0.0);
    ev.b_xi.assign(n, 0.0);
    ev.b_eta.assign(n, 0.0);
    ev.s_xi.assign(nm, 0.0);
    ev.s_eta.assign(nm, 0.0);
    model.eval_g(xi, ev.g_xi);
    model.eval_g(eta, ev.g_eta);
    model.eval_b(xi, ev.b_xi);
    model.eval_b(eta, ev.b_eta);
    model.eval_sigma(xi, ev.s_xi);
    model.eval_sigma(eta, ev.s_eta);

    const std::int64_t m = xi.delay_steps();
    const double dt = xi.dt();
    for (std::int64_t j = 0; j <= m; ++j) {
        double dsq = 0.0, xsq = 0.0;
        for (int c = 0; c < model.dim; ++c) {
            const double d = xi.node(j, c) - eta.node(j, c);
            const double x = xi.node(j, c);
            dsq += d * d;
            xsq += x * x;
        }
        const double wgt = (j == 0 || j == m) ? 0.5 : 1.0;
        ev.diff_sq_unweighted += wgt * dsq * dt;
        ev.xi_sq_unweighted += wgt * xsq * dt;
        ev.sup_diff_sq = std::max(ev.sup_diff_sq, dsq);
        ev.sup_xi_sq = std::max(ev.sup_xi_sq, xsq);
    }
    return ev;
}

inline double norm_sq(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

inline double diff_norm_sq(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace detail

/// Sample n_pairs segment pairs and record, per hypothesis, the worst
/// achieved-over-allowed ratio. Falsification only: a passing report says no
/// sampled pair violated the declared constants beyond 1 + tol.
inline AuditReport audit_assumptions(const NeutralModel& model, const SegmentPairSampler& sampler,
                                     std::int64_t n_pairs, double tol) {
    if (n_pairs < 1) throw domain_error("audit_assumptions: n_pairs must be >= 1");
    model.validate();

    const bool weighted = model.norm_mode == NormMode::Weighted;
    AuditReport report;
    auto& conds = report.conditions;
    if (weighted) {
        conds.push_back({"g_lipschitz_weighted", 0, 0, "", true});   // |dG|^2 vs kappa*int w1
        conds.push_back({"dissipativity_weighted", 0, 0, "", true}); // pairing vs -l1, +l2*int w2
        conds.push_back({"growth_weighted", 0, 0, "", true});        // single-segment growth
        conds.push_back({"sigma_lipschitz_weighted", 0, 0, "", true});
    } else {
        conds.push_back({"g_lipschitz_uniform", 0, 0, "", true});
        conds.push_back({"dissipativity_uniform", 0, 0, "", true});
        conds.push_back({"growth_uniform", 0, 0, "", true});
        conds.push_back({"sigma_lipschitz_uniform", 0, 0, "", true});
    }

    for (std::int64_t i = 0; i < n_pairs; ++i) {
        auto [xi_seg, eta_seg] = sampler(i);
        const SegmentRef xi = xi_seg.ref();
        const SegmentRef eta = eta_seg.ref();
        const auto ev = detail::evaluate_pair(model, xi, eta);

        const double dg_sq = detail::diff_norm_sq(ev.g_xi, ev.g_eta);
        const double ds_sq = detail::diff_norm_sq(ev.s_xi, ev.s_eta);

        // 2<(xi(0)-G(xi)) - (eta(0)-G(eta)), b(xi)-b(eta)>
        double pairing = 0.0;
        for (int c = 0; c < model.dim; ++c) {
            const double mdiff = (xi.endpoint(c) - ev.g_xi[static_cast<std::size_t>(c)]) -
                                 (eta.endpoint(c) - ev.g_eta[static_cast<std::size_t>(c)]);
            pairing += mdiff * (ev.b_xi[static_cast<std::size_t>(c)] -
                                ev.b_eta[static_cast<std::size_t>(c)]);
        }
        pairing *= 2.0;

        double end_diff_sq = 0.0;
        for (int c = 0; c < model.dim; ++c) {
            const double d = xi.endpoint(c) - eta.endpoint(c);
            end_diff_sq += d * d;
        }

        // single-segment growth pairing: 2<xi(0)-G(xi), b(xi)> + ||sigma(xi)||^2
        double growth_lhs = 0.0;
        for (int c = 0; c < model.dim; ++c)
            growth_lhs += (xi.endpoint(c) - ev.g_xi[static_cast<std::size_t>(c)]) *
                          ev.b_xi[static_cast<std::size_t>(c)];
        growth_lhs = 2.0 * growth_lhs + detail::norm_sq(ev.s_xi);

        double xi0_sq = 0.0;
        for (int c = 0; c < model.dim; ++c) xi0_sq += xi.endpoint(c) * xi.endpoint(c);

        if (weighted) {
            const double w1_diff = model.w1->weighted_diff_sq(xi, eta);
            const double w2_diff = model.w2->weighted_diff_sq(xi, eta);
            detail::track(conds[0], dg_sq, model.kappa * w1_diff, i);
            detail::track(conds[1], pairing + ds_sq,
                          -model.lambda1 * end_diff_sq + model.lambda2 * w2_diff, i);
            // growth integral is unweighted, exactly as printed
            detail::track(conds[2], growth_lhs,
                          model.delta * (1.0 + xi0_sq + ev.xi_sq_unweighted), i);
            detail::track(conds[3], ds_sq, model.lambda3 * ev.diff_sq_unweighted, i);
        } else {
            detail::track(conds[0], std::sqrt(dg_sq),
                          model.kappa * std::sqrt(ev.sup_diff_sq), i);
            detail::track(conds[1], pairing + ds_sq, model.lambda2 * ev.sup_diff_sq, i);
            detail::track(conds[2], growth_lhs, model.lambda1 * (1.0 + ev.sup_xi_sq), i);
            detail::track(conds[3], ds_sq, model.lambda3 * ev.sup_diff_sq, i);
        }
    }

    for (auto& c : conds) {
        c.pass = c.worst_ratio <= 1.0 + tol;
        report.pass = report.pass && c.pass;
    }
    return report;
}

inline AuditReport audit_assumptions(const NeutralModel& model, std::int64_t n_pairs, double tol,
                                     std::uint64_t seed, std::int64_t segment_steps = 16,
                                     double box = 2.0) {
    DefaultPairSampler sampler(model.tau, segment_steps, model.dim, seed, box);
    return audit_assumptions(model, SegmentPairSampler(sampler), n_pairs, tol);
}

}  // namespace ntci
