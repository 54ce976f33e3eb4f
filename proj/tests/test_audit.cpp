#include <cmath>
#include <span>

#include "doctest.h"
#include "ntci/audit.hpp"
#include "test_helpers.hpp"

using namespace ntci;

namespace {

// G(xi) = w * xi(-tau): the discrete-delay neutral term.
CoeffFn delayed_scale(double w) {
    return [w](const SegmentRef& seg, std::span<double> out) {
        for (int c = 0; c < seg.dim(); ++c)
            out[static_cast<std::size_t>(c)] = w * seg.node(0, c);
    };
}

// G(xi) = w * (1/tau) int xi, with the same trapezoid rule the audit uses.
CoeffFn averaged_scale(double w) {
    return [w](const SegmentRef& seg, std::span<double> out) {
        const std::int64_t m = seg.delay_steps();
        const double dt = seg.dt();
        const double tau = seg.tau();
        for (int c = 0; c < seg.dim(); ++c) {
            double acc = 0.5 * (seg.node(0, c) + seg.node(m, c));
            for (std::int64_t j = 1; j < m; ++j) acc += seg.node(j, c);
            out[static_cast<std::size_t>(c)] = w * acc * dt / tau;
        }
    };
}

}  // namespace

TEST_CASE("discrete-delay neutral term passes the uniform Lipschitz audit") {
    NeutralModel m;
    m.dim = 1;
    m.noise_dim = 1;
    m.tau = 1.0;
    m.norm_mode = NormMode::Uniform;
    m.g = delayed_scale(0.5);
    m.g_strictly_past = true;
    m.kappa = 0.5;
    m.lambda1 = 1.0;  // growth bound, trivially satisfied for b = 0
    m.lambda2 = 0.0;
    m.lambda3 = 0.0;

    auto report = audit_assumptions(m, 300, 1e-9, 77);
    CHECK(report.pass);
    CHECK(report.find("g_lipschitz_uniform").worst_ratio <= 1.0 + 1e-9);
}

TEST_CASE("averaged neutral term passes the weighted audit via Cauchy-Schwarz") {
    NeutralModel m;
    m.dim = 2;
    m.noise_dim = 1;
    m.tau = 0.5;
    m.norm_mode = NormMode::Weighted;
    m.g = averaged_scale(0.5);
    m.kappa = 0.25;
    m.lambda1 = 0.0;
    m.lambda2 = 0.0;
    m.lambda3 = 0.0;
    m.delta = 1.0;
    m.w1 = DelayWeight::uniform(m.tau);
    m.w2 = DelayWeight::uniform(m.tau);

    auto report = audit_assumptions(m, 300, 1e-9, 123);
    CHECK(report.find("g_lipschitz_weighted").pass);
    CHECK(report.find("g_lipschitz_weighted").worst_ratio <= 1.0 + 1e-9);
}

TEST_CASE("dissipativity with a delay atom follows the Young split") {
    // b(xi) = -3 xi(0) + xi(-tau), sigma constant: the pairing satisfies
    // LHS <= -5 |d0|^2 + |d(-tau)|^2, i.e. lambda1 = 5, lambda2 = 1 with w2
    // a point mass at -tau.
    NeutralModel m;
    m.dim = 1;
    m.noise_dim = 1;
    m.tau = 0.5;
    m.norm_mode = NormMode::Weighted;
    m.b = [](const SegmentRef& seg, std::span<double> out) {
        out[0] = -3.0 * seg.endpoint(0) + seg.node(0, 0);
    };
    m.sigma = [](const SegmentRef&, std::span<double> out) { out[0] = 0.7; };
    m.kappa = 0.0;  // G = 0
    m.lambda1 = 5.0;
    m.lambda2 = 1.0;
    m.lambda3 = 0.0;
    m.delta = 20.0;
    m.sigma_bound = 0.7;
    m.w1 = DelayWeight::uniform(m.tau);
    m.w2 = DelayWeight::point_mass(m.tau, -m.tau);

    auto report = audit_assumptions(m, 500, 1e-9, 9);
    CHECK(report.find("dissipativity_weighted").pass);
    CHECK(report.find("sigma_lipschitz_weighted").pass);  // constant sigma
}

TEST_CASE("tol = 0 holds for the linear model with exact constants") {
    auto m = ntci_test::ou_model(0.5, 1.0);
    m.delta = 2.0;
    auto report = audit_assumptions(m, 400, 0.0, 4242);
    CHECK(report.pass);
}

TEST_CASE("scaling G by c rescales kappa by c^2 in weighted mode") {
    for (double scale : {0.9, 0.5, 0.2}) {
        NeutralModel m;
        m.dim = 1;
        m.noise_dim = 1;
        m.tau = 0.5;
        m.norm_mode = NormMode::Weighted;
        m.g = averaged_scale(0.8 * scale);
        m.kappa = 0.64 * scale * scale;
        m.lambda1 = 0.0;
        m.lambda2 = 0.0;
        m.lambda3 = 0.0;
        m.w1 = DelayWeight::uniform(m.tau);
        m.w2 = DelayWeight::uniform(m.tau);
        auto report = audit_assumptions(m, 200, 1e-9, 31);
        CHECK(report.find("g_lipschitz_weighted").pass);
    }
}

TEST_CASE("audit is deterministic for a fixed sampler seed") {
    auto m = ntci_test::ou_model(0.5, 1.0);
    m.delta = 2.0;
    auto a = audit_assumptions(m, 100, 1e-6, 555);
    auto b = audit_assumptions(m, 100, 1e-6, 555);
    REQUIRE(a.conditions.size() == b.conditions.size());
    for (std::size_t i = 0; i < a.conditions.size(); ++i) {
        CHECK(a.conditions[i].worst_ratio == b.conditions[i].worst_ratio);
        CHECK(a.conditions[i].worst_pair == b.conditions[i].worst_pair);
    }
}

TEST_CASE("an understated kappa is falsified") {
    NeutralModel m;
    m.dim = 1;
    m.noise_dim = 1;
    m.tau = 1.0;
    m.norm_mode = NormMode::Uniform;
    m.g = delayed_scale(0.5);
    m.kappa = 0.2;  // actual Lipschitz constant is 0.5
    m.lambda1 = 1.0;
    auto report = audit_assumptions(m, 100, 1e-6, 2);
    CHECK_FALSE(report.find("g_lipschitz_uniform").pass);
    CHECK(report.find("g_lipschitz_uniform").worst_ratio > 2.0);
}

TEST_CASE("zero allowed with positive achieved records an infinite ratio") {
    NeutralModel m;
    m.dim = 1;
    m.noise_dim = 1;
    m.tau = 1.0;
    m.norm_mode = NormMode::Uniform;
    m.sigma = [](const SegmentRef& seg, std::span<double> out) { out[0] = seg.endpoint(0); };
    m.kappa = 0.0;
    m.lambda1 = 10.0;
    m.lambda2 = 10.0;
    m.lambda3 = 0.0;  // claims sigma is constant, which it is not
    m.sigma_bound = 100.0;
    auto report = audit_assumptions(m, 50, 1e-6, 8);
    CHECK_FALSE(report.find("sigma_lipschitz_uniform").pass);
    CHECK(std::isinf(report.find("sigma_lipschitz_uniform").worst_ratio));
}
