#include <cmath>
#include <vector>

#include "doctest.h"
#include "ntci/tci.hpp"
#include "test_helpers.hpp"

using namespace ntci;

namespace {

// closed form of int_0^1 (1 - e^{-t})^2 dt, the deterministic coupled
// difference energy for the OU test with h = 1
double ou_coupling_l2_sq() {
    return 1.0 + 2.0 * std::exp(-1.0) - 0.5 * std::exp(-2.0) - 1.5;
}

}  // namespace

TEST_CASE("zero perturbation passes trivially") {
    auto model = ntci_test::ou_model(0.25, 1.0);
    TimeGrid grid(0.25, 1.0, 1.0 / 64.0);
    Segment xi = Segment::constant(0.25, grid.delay_steps(), std::vector<double>{1.0});
    auto verdict = verify_tci(model, xi, Perturbation::zero(), PathMetricKind::L2InTime, grid,
                              32, 17);
    CHECK(verdict.entropy.mean == 0.0);
    CHECK(verdict.coupling_sq.mean == 0.0);
    CHECK(verdict.ratio == 0.0);
    CHECK(verdict.pass);
}

TEST_CASE("OU with unit shift passes under dL2 and matches the analytic difference") {
    auto model = ntci_test::ou_model(0.25, 1.0);
    TimeGrid grid(0.25, 1.0, 1.0 / 256.0);
    Segment xi = Segment::constant(0.25, grid.delay_steps(), std::vector<double>{1.0});
    TciOptions options;
    options.workers = 2;
    auto verdict = verify_tci(model, xi, Perturbation::constant({1.0}), PathMetricKind::L2InTime,
                              grid, 512, 99, options);
    CHECK(verdict.entropy.mean == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(verdict.entropy.halfwidth == 0.0);
    // shared noise cancels: the coupled distance is deterministic up to
    // floating-point cancellation in X - Y
    CHECK(verdict.coupling_sq.halfwidth <= 1e-14);
    CHECK(verdict.coupling_sq.mean ==
          doctest::Approx(ou_coupling_l2_sq()).epsilon(2e-3));
    CHECK(verdict.pass);
    CHECK(verdict.ratio <= verdict.theoretical_c.c_metric);
}

TEST_CASE("empirical W2 cross-check stays below the coupling bound") {
    auto model = ntci_test::ou_model(0.25, 1.0);
    TimeGrid grid(0.25, 1.0, 1.0 / 64.0);
    Segment xi = Segment::constant(0.25, grid.delay_steps(), std::vector<double>{1.0});
    TciOptions options;
    options.workers = 2;
    options.want_empirical = true;
    options.empirical_cap = 128;
    auto verdict = verify_tci(model, xi, Perturbation::constant({1.0}), PathMetricKind::L2InTime,
                              grid, 256, 7, options);
    REQUIRE(verdict.empirical_w2_value.has_value());
    CHECK(*verdict.empirical_w2_value > 0.0);
    CHECK(verdict.empirical_consistent);
    const double w2_sq = *verdict.empirical_w2_value * *verdict.empirical_w2_value;
    CHECK(w2_sq <= verdict.coupling_sq.mean + *verdict.w2_slack);
}

TEST_CASE("the Gronwall envelope bounds the deterministic coupled difference") {
    auto model = ntci_test::ou_model(0.25, 1.0);
    TimeGrid grid(0.25, 1.0, 1.0 / 256.0);
    Segment xi = Segment::constant(0.25, grid.delay_steps(), std::vector<double>{1.0});
    AssembleOptions opts;
    opts.epsilon = 0.5;
    auto constants = assemble_constants(model, PathMetricKind::L2InTime, 1.0, opts);
    const double beta1 = *constants.beta1;
    const double beta2 = *constants.beta2;

    NoisePlan noise(4, 0, 1, grid.dt());
    auto sample = simulate_coupled(model, xi, Perturbation::constant({1.0}), grid, noise);
    for (std::int64_t k = 0; k <= grid.horizon_steps(); ++k) {
        const double t = static_cast<double>(k) * grid.dt();
        const std::int64_t node = grid.zero_index() + k;
        const double d = sample.x.value(node, 0) - sample.y.value(node, 0);
        // envelope: beta2 * int_0^t e^{-beta1 (t-s)} |h|^2 ds for |h| = 1
        const double envelope = beta2 * (1.0 - std::exp(-beta1 * t)) / beta1;
        CHECK(d * d <= envelope + 2.0 * grid.dt());
    }
}

TEST_CASE("uniform-mode verify closes the sup-metric loop") {
    auto model = ntci_test::ou_model(0.25, 1.0);
    model.norm_mode = NormMode::Uniform;
    model.lambda1 = 1.0;  // growth bound for the uniform hypotheses
    model.lambda2 = 0.0;  // the pairing is nonpositive for the contraction drift
    TimeGrid grid(0.25, 1.0, 1.0 / 128.0);
    Segment xi = Segment::constant(0.25, grid.delay_steps(), std::vector<double>{1.0});
    auto verdict = verify_tci(model, xi, Perturbation::constant({1.0}),
                              PathMetricKind::UniformSup, grid, 64, 5);
    CHECK_FALSE(verdict.theoretical_c.lambda_tilde.has_value());
    CHECK(verdict.pass);
}

TEST_CASE("a model with overstated dissipativity fails the verdict") {
    auto model = ntci_test::ou_model(0.25, 1.0);
    model.lambda1 = 60.0;  // false claim: the true rate is 2
    TimeGrid grid(0.25, 1.0, 1.0 / 128.0);
    Segment xi = Segment::constant(0.25, grid.delay_steps(), std::vector<double>{1.0});
    auto verdict = verify_tci(model, xi, Perturbation::constant({1.0}), PathMetricKind::L2InTime,
                              grid, 64, 3);
    CHECK_FALSE(verdict.pass);  // C ~ 4/59 is far below the realized ratio
}

TEST_CASE("feedback perturbations respect the energy cap") {
    auto model = ntci_test::ou_model(0.25, 1.0);
    TimeGrid grid(0.25, 1.0, 1.0 / 64.0);
    Segment xi = Segment::constant(0.25, grid.delay_steps(), std::vector<double>{1.0});
    Perturbation pert = Perturbation::feedback(1.0);
    pert.energy_cap = 1e-6;
    NoisePlan noise(1, 0, 1, grid.dt());
    CHECK_THROWS_AS(simulate_coupled(model, xi, pert, grid, noise), ntci::overflow_error);
}
