#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ntci/errors.hpp"
#include "ntci/path.hpp"
#include "ntci/weights.hpp"

namespace ntci {

/// Whether the differential applies to X - G(X_t) (finite-dimensional form)
/// or X + G(X_t) (the semigroup form).
enum class NeutralSign { Minus, Plus };

/// Which family of structural hypotheses the declared constants refer to:
/// weighted integral bounds or segment uniform-norm bounds.
enum class NormMode { Weighted, Uniform };

/// Vector-valued coefficient: writes the value of the functional at a
/// segment into `out`. Must be a pure function of the segment (ensembles
/// invoke it concurrently).
using CoeffFn = std::function<void(const SegmentRef&, std::span<double>)>;

/// Matrix-valued diffusion coefficient, row-major dim x noise_dim.
using DiffusionFn = std::function<void(const SegmentRef&, std::span<double>)>;

/// The coefficient triple (G, b, sigma) of a neutral functional SDE together
/// with its declared assumption constants. The constants are *claims*; the
/// audit module falsifies them by sampling, it never proves them.
class NeutralModel {
public:
    int dim = 1;
    int noise_dim = 1;
    double tau = 1.0;
    NeutralSign sign = NeutralSign::Minus;
    NormMode norm_mode = NormMode::Weighted;

    CoeffFn g;          // neutral term; empty means G == 0
    CoeffFn b;          // drift
    DiffusionFn sigma;  // diffusion; empty means sigma == 0

    // Declared constants. kappa = 0 is allowed only for G == 0 (the
    // memoryless limit); otherwise kappa must lie in (0,1).
    double kappa = 0.5;
    double lambda1 = 1.0;       // lambda1 (weighted) or lambda1~ >= 0 (uniform)
    double lambda2 = 0.0;       // >= 0
    double lambda3 = 0.0;       // >= 0, diffusion Lipschitz constant
    double delta = 1.0;         // > 0, growth bound
    double sigma_bound = 0.0;   // sup of the HS norm of sigma

    std::optional<DelayWeight> w1;  // weighted mode, neutral-term weight
    std::optional<DelayWeight> w2;  // weighted mode, drift/diffusion weight

    /// True when G only reads strictly-past nodes (support within
    /// [-tau, -dt]); the neutral inversion is then a single evaluation.
    bool g_strictly_past = false;

    bool g_is_zero() const { return !static_cast<bool>(g); }
    bool sigma_is_zero() const { return !static_cast<bool>(sigma); }

    void eval_g(const SegmentRef& seg, std::span<double> out) const {
        if (g) {
            g(seg, out);
        } else {
            for (auto& v : out) v = 0.0;
        }
    }

    void eval_b(const SegmentRef& seg, std::span<double> out) const {
        if (b) {
            b(seg, out);
        } else {
            for (auto& v : out) v = 0.0;
        }
    }

    void eval_sigma(const SegmentRef& seg, std::span<double> out) const {
        if (sigma) {
            sigma(seg, out);
        } else {
            for (auto& v : out) v = 0.0;
        }
    }

    /// Structural validation plus the G(0) = 0 probe on the zero segment.
    void validate() const {
        if (dim < 1 || noise_dim < 1) throw domain_error("NeutralModel: dimensions must be >= 1");
        if (!(tau > 0.0)) throw domain_error("NeutralModel: tau must be > 0");
        if (kappa < 0.0 || kappa >= 1.0)
            throw domain_error("NeutralModel: kappa must lie in [0, 1)");
        if (kappa == 0.0 && !g_is_zero())
            throw domain_error("NeutralModel: kappa = 0 is reserved for G == 0");
        if (lambda2 < 0.0 || lambda3 < 0.0 || sigma_bound < 0.0)
            throw domain_error("NeutralModel: lambda2, lambda3, sigma_bound must be >= 0");
        if (!(delta > 0.0)) throw domain_error("NeutralModel: delta must be > 0");
        if (norm_mode == NormMode::Weighted) {
            if (!w1 || !w2)
                throw domain_error("NeutralModel: weighted mode requires w1 and w2");
            if (std::abs(w1->tau() - tau) > 1e-12 || std::abs(w2->tau() - tau) > 1e-12)
                throw domain_error("NeutralModel: weight tau must match model tau");
        }
        if (g) {
            Segment zero(tau, 8, dim);
            std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
            g(zero.ref(), out);
            double norm = 0.0;
            for (double v : out) norm += v * v;
            if (std::sqrt(norm) > 1e-12)
                throw domain_error("NeutralModel: G(0) must be 0, got norm " +
                                   std::to_string(std::sqrt(norm)));
        }
    }
};

}  // namespace ntci
