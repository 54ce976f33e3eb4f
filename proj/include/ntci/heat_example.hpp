#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "ntci/errors.hpp"
#include "ntci/spde.hpp"

namespace ntci {

/// The worked heat-equation instance: Dirichlet Laplacian on [0, pi], drift
/// phi applied to the time-integrated history pointwise in space, and a
/// smoothing integral kernel as the neutral term. The kernel is given by its
/// double sine expansion,
///   varphi(theta, s, x) = (1/tau) * sum_{p,q} A[p][q] e_p(s) e_q(x),
/// constant in theta, which keeps every derived quantity in closed form.
struct HeatExampleSpec {
    double tau = 0.25;
    double lipschitz = 0.5;                    // L with |phi(x)-phi(y)| <= L|x-y|
    std::function<double(double)> phi;         // defaults to L * x
    std::vector<std::vector<double>> kernel_modes;  // A[p][q]

    /// Closed-form kernel energy: the triple integral of (d varphi / dx)^2.
    /// Differentiating e_q(x) gives q * sqrt(2/pi) cos(q x), an orthonormal
    /// family, so the energy is sum A_pq^2 q^2 / tau.
    double kernel_energy() const {
        double acc = 0.0;
        for (std::size_t p = 0; p < kernel_modes.size(); ++p)
            for (std::size_t q = 0; q < kernel_modes[p].size(); ++q) {
                const double a = kernel_modes[p][q];
                acc += a * a * static_cast<double>((q + 1) * (q + 1));
            }
        return acc / tau;
    }

    /// Single separable mode c * sin(s) * sin(x) / tau.
    static HeatExampleSpec single_mode(double tau, double lipschitz, double amplitude) {
        HeatExampleSpec spec;
        spec.tau = tau;
        spec.lipschitz = lipschitz;
        spec.kernel_modes = {{amplitude * std::numbers::pi / 2.0}};
        return spec;
    }
};

namespace detail {

/// Trapezoid time integral of each coefficient over the delay window.
inline void segment_time_integral(const SegmentRef& seg, std::span<double> out) {
    const std::int64_t m = seg.delay_steps();
    const double dt = seg.dt();
    for (int c = 0; c < seg.dim(); ++c) {
        double acc = 0.5 * (seg.node(0, c) + seg.node(m, c));
        for (std::int64_t j = 1; j < m; ++j) acc += seg.node(j, c);
        out[static_cast<std::size_t>(c)] = acc * dt;
    }
}

}  // namespace detail

/// Assemble the Galerkin model of the example: M = 1, nu = -1, rho1 = L*tau,
/// rho2 = 0 (additive cylindrical noise), alpha = 1/2 and rho3 = sqrt(N*tau)
/// with N the kernel energy.
inline SpdeModel build_heat_example(const HeatExampleSpec& spec, int modes) {
    if (modes < 1) throw domain_error("build_heat_example: modes must be >= 1");
    if (!(spec.tau > 0.0)) throw domain_error("build_heat_example: tau must be > 0");
    const double energy = spec.kernel_energy();
    if (!std::isfinite(energy))
        throw domain_error("build_heat_example: kernel energy must be finite");
    for (const auto& row : spec.kernel_modes) {
        if (row.size() > static_cast<std::size_t>(modes))
            throw domain_error("build_heat_example: kernel output modes exceed the truncation");
    }
    if (spec.kernel_modes.size() > static_cast<std::size_t>(modes))
        throw domain_error("build_heat_example: kernel input modes exceed the truncation");

    SpdeModel model;
    model.modes = modes;
    model.tau = spec.tau;
    model.alpha = 0.5;
    model.rho1 = spec.lipschitz * spec.tau;
    model.rho2 = 0.0;
    model.rho3 = std::sqrt(energy * spec.tau);
    model.semigroup_m = 1.0;
    model.nu = -1.0;
    model.sigma_mode = SpdeModel::SigmaMode::Identity;

    const double tau = spec.tau;
    const auto kernel = spec.kernel_modes;
    if (!kernel.empty()) {
        model.g = [kernel, tau](const SegmentRef& seg, std::span<double> out) {
            std::vector<double> integral(static_cast<std::size_t>(seg.dim()));
            detail::segment_time_integral(seg, integral);
            for (auto& v : out) v = 0.0;
            for (std::size_t p = 0; p < kernel.size(); ++p)
                for (std::size_t q = 0; q < kernel[p].size(); ++q)
                    out[q] += kernel[p][q] * integral[p] / tau;
        };
    }

    const double lipschitz = spec.lipschitz;
    std::function<double(double)> phi =
        spec.phi ? spec.phi : [lipschitz](double x) { return lipschitz * x; };
    const bool linear_phi = !spec.phi;
    const int quad_points = 512;
    model.b = [phi, linear_phi, lipschitz, quad_points](const SegmentRef& seg,
                                                        std::span<double> out) {
        const int k = seg.dim();
        std::vector<double> integral(static_cast<std::size_t>(k));
        detail::segment_time_integral(seg, integral);
        if (linear_phi) {
            // phi = L*x commutes with the basis projection
            for (int c = 0; c < k; ++c)
                out[static_cast<std::size_t>(c)] = lipschitz * integral[static_cast<std::size_t>(c)];
            return;
        }
        // nonlinear phi: evaluate on an x-grid and project back (midpoint rule)
        const double pi = std::numbers::pi;
        const double dx = pi / quad_points;
        const double scale = std::sqrt(2.0 / pi);
        for (auto& v : out) v = 0.0;
        for (int j = 0; j < quad_points; ++j) {
            const double x = (static_cast<double>(j) + 0.5) * dx;
            double u = 0.0;
            for (int n = 1; n <= k; ++n)
                u += integral[static_cast<std::size_t>(n - 1)] * scale *
                     std::sin(static_cast<double>(n) * x);
            const double fu = phi(u);
            for (int n = 1; n <= k; ++n)
                out[static_cast<std::size_t>(n - 1)] +=
                    fu * scale * std::sin(static_cast<double>(n) * x) * dx;
        }
    };
    return model;
}

/// Numerical triple quadrature of the kernel energy, for cross-checking the
/// closed form: int (d varphi/dx)^2 over theta, s, x.
inline double heat_kernel_energy_quadrature(const HeatExampleSpec& spec, int panels = 256) {
    const double pi = std::numbers::pi;
    const double dx = pi / panels;
    const double scale = std::sqrt(2.0 / pi);
    double acc = 0.0;
    for (int is = 0; is < panels; ++is) {
        const double s = (is + 0.5) * dx;
        for (int ix = 0; ix < panels; ++ix) {
            const double x = (ix + 0.5) * dx;
            double deriv = 0.0;
            for (std::size_t p = 0; p < spec.kernel_modes.size(); ++p)
                for (std::size_t q = 0; q < spec.kernel_modes[p].size(); ++q) {
                    const auto qq = static_cast<double>(q + 1);
                    deriv += spec.kernel_modes[p][q] / spec.tau * scale *
                             std::sin(static_cast<double>(p + 1) * s) * scale * qq *
                             std::cos(qq * x);
                }
            acc += deriv * deriv * dx * dx;
        }
    }
    return acc * spec.tau;  // theta integral of a theta-constant kernel
}

}  // namespace ntci
