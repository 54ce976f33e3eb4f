#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "ntci/errors.hpp"

namespace ntci {

/// Coefficients on the Dirichlet sine basis e_n(x) = sqrt(2/pi) sin(n x) of
/// L^2([0, pi]); the generator acts as A e_n = -n^2 e_n. By Parseval the L^2
/// norm equals the Euclidean norm of the coefficients.
struct SpectralField {
    std::vector<double> coeffs;

    int modes() const { return static_cast<int>(coeffs.size()); }

    double norm() const {
        double s = 0.0;
        for (double c : coeffs) s += c * c;
        return std::sqrt(s);
    }

    /// Pointwise reconstruction at x in [0, pi].
    double evaluate(double x) const {
        const double scale = std::sqrt(2.0 / std::numbers::pi);
        double acc = 0.0;
        for (int n = 1; n <= modes(); ++n)
            acc += coeffs[static_cast<std::size_t>(n - 1)] * scale *
                   std::sin(static_cast<double>(n) * x);
        return acc;
    }

    static SpectralField basis(int k, int n) {
        if (n < 1 || n > k) throw domain_error("SpectralField::basis: n out of range");
        SpectralField f;
        f.coeffs.assign(static_cast<std::size_t>(k), 0.0);
        f.coeffs[static_cast<std::size_t>(n - 1)] = 1.0;
        return f;
    }
};

/// Heat semigroup: coefficient n decays by e^{-n^2 t}.
inline SpectralField semigroup_apply(double t, const SpectralField& v) {
    if (t < 0.0) throw domain_error("semigroup_apply: t must be >= 0");
    SpectralField out = v;
    for (int n = 1; n <= v.modes(); ++n)
        out.coeffs[static_cast<std::size_t>(n - 1)] *=
            std::exp(-static_cast<double>(n) * static_cast<double>(n) * t);
    return out;
}

/// Fractional power (-A)^alpha: spectral multiplier n^{2 alpha}; negative
/// alpha gives the smoothing inverse powers.
inline SpectralField frac_power_apply(double alpha, const SpectralField& v) {
    SpectralField out = v;
    for (int n = 1; n <= v.modes(); ++n)
        out.coeffs[static_cast<std::size_t>(n - 1)] *=
            std::pow(static_cast<double>(n * n), alpha);
    return out;
}

/// The constant M_beta with ||(-A)^beta e^{tA}|| <= M_beta t^{-beta} e^{nu t}
/// on (0, t_max], computed as a sup over a dense log grid. The spectral
/// maximum over n <= k_modes is exact via the two integer candidates around
/// the continuous argmax; where truncation bites (argmax beyond k_modes) the
/// continuous envelope sup_x x^{2 beta} e^{-x^2 t} = (beta/(e t))^beta floors
/// the value.
inline double smoothing_bound_constant(double beta, double nu, int k_modes, double t_max,
                              double t_min = 1e-8, int grid_points = 8192) {
    if (!(beta > 0.0) || beta > 1.0) throw domain_error("smoothing_bound_constant: beta must be in (0,1]");
    if (!(t_max > t_min) || !(t_min > 0.0))
        throw domain_error("smoothing_bound_constant: need 0 < t_min < t_max");
    if (k_modes < 1) throw domain_error("smoothing_bound_constant: k_modes must be >= 1");

    auto op_norm = [&](double t) {
        const double x_star = std::sqrt(beta / t);
        double best = 0.0;
        auto probe = [&](double n) {
            if (n < 1.0 || n > static_cast<double>(k_modes)) return;
            best = std::max(best, std::pow(n * n, beta) * std::exp(-n * n * t));
        };
        probe(1.0);
        probe(static_cast<double>(k_modes));
        probe(std::floor(x_star));
        probe(std::ceil(x_star));
        if (x_star > static_cast<double>(k_modes)) {
            const double envelope = std::pow(beta / (std::numbers::e * t), beta);
            best = std::max(best, envelope);
        }
        return best;
    };

    const double log_lo = std::log(t_min);
    const double log_hi = std::log(t_max);
    double m_beta = 0.0;
    for (int i = 0; i <= grid_points; ++i) {
        const double t = std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                                               static_cast<double>(grid_points));
        m_beta = std::max(m_beta, std::pow(t, beta) * std::exp(-nu * t) * op_norm(t));
    }
    return m_beta;
}

}  // namespace ntci
