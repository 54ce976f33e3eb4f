#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "ntci/model.hpp"
#include "ntci/path.hpp"
#include "ntci/rng.hpp"
#include "ntci/simulate.hpp"

namespace ntci_test {

/// Scalar Ornstein-Uhlenbeck model dX = -X dt + s dW with G = 0.
inline ntci::NeutralModel ou_model(double tau, double s) {
    ntci::NeutralModel m;
    m.dim = 1;
    m.noise_dim = 1;
    m.tau = tau;
    m.kappa = 0.0;
    m.lambda1 = 2.0;
    m.lambda2 = 0.0;
    m.lambda3 = 0.0;
    m.delta = std::max(1.0, s * s);
    m.sigma_bound = s;
    m.w1 = ntci::DelayWeight::uniform(tau);
    m.w2 = ntci::DelayWeight::uniform(tau);
    m.b = [](const ntci::SegmentRef& seg, std::span<double> out) { out[0] = -seg.endpoint(0); };
    if (s != 0.0) {
        m.sigma = [s](const ntci::SegmentRef&, std::span<double> out) { out[0] = s; };
    }
    return m;
}

/// Exact simulation of the OU endpoint coupled to the Euler increments:
/// each step splits the stochastic convolution into its projection onto the
/// step increment plus an independent Gaussian residual, so the difference
/// to the Euler path is the true strong error under the natural coupling.
inline double ou_exact_endpoint(double x0, double dt, std::int64_t steps,
                                const ntci::NoisePlan& shared,
                                const ntci::rng::GaussianStream& residual_stream) {
    const double decay = std::exp(-dt);
    const double proj = (1.0 - decay) / dt;  // E[conv | increment] coefficient
    const double conv_var = 0.5 * (1.0 - std::exp(-2.0 * dt));
    const double resid_var = conv_var - proj * proj * dt;
    const double resid_sd = std::sqrt(std::max(0.0, resid_var));
    double x = x0;
    for (std::int64_t k = 0; k < steps; ++k) {
        const double dw = shared.increment(static_cast<std::uint64_t>(k), 0);
        const double resid = resid_sd * residual_stream.normal(static_cast<std::uint64_t>(k), 0);
        x = decay * x + proj * dw + resid;
    }
    return x;
}

}  // namespace ntci_test
