#pragma once

#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ntci/errors.hpp"
#include "ntci/heat_example.hpp"
#include "ntci/model.hpp"

namespace ntci {

using ParamMap = std::map<std::string, double>;

inline double get_param(const ParamMap& params, const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

/// Catalog entry for `list`: declared constants as (symbol, formula/value).
struct BuiltinInfo {
    std::string name;
    std::string summary;
    std::vector<std::pair<std::string, std::string>> constants;
};

inline std::vector<BuiltinInfo> list_builtins() {
    return {
        {"ou",
         "memoryless linear test equation dX = -a X dt + s dW (G = 0)",
         {{"kappa", "0 (G = 0 limit)"},
          {"lambda1", "2a"},
          {"lambda2", "0"},
          {"lambda3", "0"},
          {"delta", "max(1, s^2) + 2a"},
          {"sigma_bound", "s"}}},
        {"discrete-delay",
         "delay equation d[X - g X(t-tau)] = (-a X + c X(t-tau)) dt + s dW",
         {{"kappa", "g^2 (point mass at -tau)"},
          {"lambda1", "2a - |c + a g|"},
          {"lambda2", "|c + a g| + 2|c| g (point mass at -tau)"},
          {"lambda3", "0"},
          {"delta", "calibrated to the audit quadrature"},
          {"sigma_bound", "s"}}},
        {"weighted-neutral",
         "integral neutral term d[X - g avg(X_t)] = (-a X + c avg(X_t)) dt + s dW",
         {{"kappa", "g^2 (uniform weight)"},
          {"lambda1", "2a - |c + a g|"},
          {"lambda2", "|c + a g| + 2|c| g (uniform weight)"},
          {"lambda3", "0"},
          {"delta", "calibrated to the audit quadrature"},
          {"sigma_bound", "s"}}},
        {"heat-example",
         "spectral heat equation with integral neutral kernel and cylindrical noise",
         {{"rho1", "L*tau"},
          {"rho2", "0"},
          {"rho3", "sqrt(N*tau), N the kernel energy"},
          {"alpha", "1/2"},
          {"M, nu", "1, -1"}}},
    };
}

/// Average of the segment with the trapezoid rule (matches the audit and
/// DelayWeight quadratures, so the declared kappa is exactly attained).
inline CoeffFn segment_average_coeff(double scale) {
    return [scale](const SegmentRef& seg, std::span<double> out) {
        const std::int64_t m = seg.delay_steps();
        const double dt = seg.dt();
        const double tau = seg.tau();
        for (int c = 0; c < seg.dim(); ++c) {
            double acc = 0.5 * (seg.node(0, c) + seg.node(m, c));
            for (std::int64_t j = 1; j < m; ++j) acc += seg.node(j, c);
            out[static_cast<std::size_t>(c)] = scale * acc * dt / tau;
        }
    };
}

/// Explicit overrides for the derived assumption constants (declared values
/// are claims; the audit exists to falsify overstated ones).
inline void apply_constant_overrides(NeutralModel& m, const ParamMap& params) {
    m.kappa = get_param(params, "kappa", m.kappa);
    m.lambda1 = get_param(params, "lambda1", m.lambda1);
    m.lambda2 = get_param(params, "lambda2", m.lambda2);
    m.lambda3 = get_param(params, "lambda3", m.lambda3);
    m.delta = get_param(params, "delta", m.delta);
    m.sigma_bound = get_param(params, "sigma_bound", m.sigma_bound);
}

/// Build one of the registered finite-dimensional models. Unknown names or
/// out-of-range parameters throw config_error.
inline NeutralModel make_builtin(const std::string& name, const ParamMap& params, double tau) {
    NeutralModel m;
    m.dim = 1;
    m.noise_dim = 1;
    m.tau = tau;
    m.norm_mode = NormMode::Weighted;
    m.w1 = DelayWeight::uniform(tau);
    m.w2 = DelayWeight::uniform(tau);

    const double a = get_param(params, "a", 1.0);
    const double s = get_param(params, "s", 1.0);

    if (name == "ou") {
        if (!(a > 0.0)) throw config_error("ou: rate a must be > 0");
        m.kappa = 0.0;
        m.lambda1 = 2.0 * a;
        m.lambda2 = 0.0;
        m.lambda3 = 0.0;
        m.delta = std::max(1.0, s * s) + 2.0 * a;
        m.sigma_bound = std::abs(s);
        m.b = [a](const SegmentRef& seg, std::span<double> out) {
            out[0] = -a * seg.endpoint(0);
        };
        if (s != 0.0)
            m.sigma = [s](const SegmentRef&, std::span<double> out) { out[0] = s; };
        apply_constant_overrides(m, params);
        return m;
    }

    const double g = get_param(params, "g", 0.5);
    const double c = get_param(params, "c", 0.0);
    if (name == "discrete-delay") {
        if (g < 0.0 || g * g >= 1.0)
            throw config_error("discrete-delay: need 0 <= g < 1 for the neutral contraction");
        m.kappa = g * g;
        m.w1 = DelayWeight::point_mass(tau, -tau);
        m.w2 = DelayWeight::point_mass(tau, -tau);
        const double young = std::abs(c + a * g);
        m.lambda1 = 2.0 * a - young;
        m.lambda2 = young + 2.0 * std::abs(c) * g;
        m.lambda3 = 0.0;
        // point evaluations at -tau are controlled by the audit quadrature
        // weight dt/2, so the growth constant carries that factor
        m.delta = (1.0 + s * s + 2.0 * (a + std::abs(c)) * (1.0 + g)) * std::max(1.0, 40.0 / tau);
        m.sigma_bound = std::abs(s);
        if (g != 0.0) {
            m.g = [g](const SegmentRef& seg, std::span<double> out) {
                for (int cc = 0; cc < seg.dim(); ++cc)
                    out[static_cast<std::size_t>(cc)] = g * seg.node(0, cc);
            };
            m.g_strictly_past = true;
        } else {
            m.kappa = 0.0;
        }
        m.b = [a, c](const SegmentRef& seg, std::span<double> out) {
            out[0] = -a * seg.endpoint(0) + c * seg.node(0, 0);
        };
        if (s != 0.0)
            m.sigma = [s](const SegmentRef&, std::span<double> out) { out[0] = s; };
        apply_constant_overrides(m, params);
        return m;
    }

    if (name == "weighted-neutral") {
        if (g < 0.0 || g * g >= 1.0)
            throw config_error("weighted-neutral: need 0 <= g < 1 for the neutral contraction");
        m.kappa = g * g;
        const double young = std::abs(c + a * g);
        m.lambda1 = 2.0 * a - young;
        m.lambda2 = young + 2.0 * std::abs(c) * g;
        m.lambda3 = 0.0;
        m.delta =
            (1.0 + s * s + 2.0 * (a + std::abs(c)) * (1.0 + g)) * std::max(1.0, 1.0 / tau);
        m.sigma_bound = std::abs(s);
        if (g != 0.0) {
            m.g = segment_average_coeff(g);
        } else {
            m.kappa = 0.0;
        }
        auto avg = segment_average_coeff(1.0);
        m.b = [a, c, avg](const SegmentRef& seg, std::span<double> out) {
            avg(seg, out);
            out[0] = -a * seg.endpoint(0) + c * out[0];
        };
        if (s != 0.0)
            m.sigma = [s](const SegmentRef&, std::span<double> out) { out[0] = s; };
        apply_constant_overrides(m, params);
        return m;
    }

    throw config_error("unknown builtin model '" + name + "'");
}

/// The heat example assembled from config parameters (L, amplitude, modes).
inline SpdeModel make_heat_builtin(const ParamMap& params, double tau, int modes) {
    const double lipschitz = get_param(params, "lipschitz", 0.5);
    const double amplitude = get_param(params, "amplitude", 0.1);
    auto spec = HeatExampleSpec::single_mode(tau, lipschitz, amplitude);
    return build_heat_example(spec, modes);
}

}  // namespace ntci
