#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "ntci/errors.hpp"
#include "ntci/path.hpp"

namespace ntci {

/// A probability weight on [-tau, 0]: an optional density plus point masses.
/// Point masses cover the discrete-delay case (G(xi(-tau)) needs an atom at
/// -tau). Total mass must be 1 to 1e-10, checked by quadrature.
class DelayWeight {
public:
    struct Atom {
        double theta;  // in [-tau, 0]
        double mass;   // >= 0
    };

    /// Single atom of mass 1.
    static DelayWeight point_mass(double tau, double theta) {
        DelayWeight w(tau);
        w.atoms_.push_back({theta, 1.0});
        w.validate();
        return w;
    }

    /// Uniform density 1/tau on [-tau, 0].
    static DelayWeight uniform(double tau) {
        DelayWeight w(tau);
        w.density_ = [tau](double) { return 1.0 / tau; };
        w.density_mass_ = 1.0;
        w.validate();
        return w;
    }

    static DelayWeight from_density(double tau, std::function<double(double)> density) {
        DelayWeight w(tau);
        w.density_ = std::move(density);
        w.density_mass_ = w.integrate_density([](double) { return 1.0; });
        w.validate();
        return w;
    }

    static DelayWeight mixed(double tau, std::function<double(double)> density,
                             std::vector<Atom> atoms) {
        DelayWeight w(tau);
        w.density_ = std::move(density);
        w.atoms_ = std::move(atoms);
        w.density_mass_ = w.density_ ? w.integrate_density([](double) { return 1.0; }) : 0.0;
        w.validate();
        return w;
    }

    double tau() const { return tau_; }
    bool has_density() const { return static_cast<bool>(density_); }
    const std::vector<Atom>& atoms() const { return atoms_; }

    /// integral of w(theta) f(theta) dtheta + sum of atom masses at f.
    double integrate(const std::function<double(double)>& f) const {
        double acc = 0.0;
        if (density_) acc += integrate_density(f);
        for (const Atom& a : atoms_) acc += a.mass * f(a.theta);
        return acc;
    }

    /// Weighted squared segment-difference integral, the right-hand side
    /// kernel of the weighted assumptions. The density part uses the
    /// trapezoid rule on the segment grid so linear functionals built with
    /// the same rule satisfy their Cauchy-Schwarz bounds exactly.
    double weighted_diff_sq(const SegmentRef& xi, const SegmentRef& eta) const {
        double acc = 0.0;
        if (density_) {
            const std::int64_t m = xi.delay_steps();
            const double dt = xi.dt();
            for (std::int64_t j = 0; j <= m; ++j) {
                const double theta = -tau_ + static_cast<double>(j) * dt;
                double dsq = 0.0;
                for (int c = 0; c < xi.dim(); ++c) {
                    const double d = xi.node(j, c) - eta.node(j, c);
                    dsq += d * d;
                }
                const double wgt = (j == 0 || j == m) ? 0.5 : 1.0;
                acc += wgt * density_(theta) * dsq * dt;
            }
        }
        for (const Atom& a : atoms_) {
            double dsq = 0.0;
            for (int c = 0; c < xi.dim(); ++c) {
                const double d = xi.eval(a.theta, c) - eta.eval(a.theta, c);
                dsq += d * d;
            }
            acc += a.mass * dsq;
        }
        return acc;
    }

private:
    explicit DelayWeight(double tau) : tau_(tau) {
        if (!(tau > 0.0)) throw domain_error("DelayWeight: tau must be > 0");
    }

    double integrate_density(const std::function<double(double)>& f) const {
        // composite Simpson, 4096 panels
        const int panels = 4096;
        const double h = tau_ / panels;
        double acc = density_(-tau_) * f(-tau_) + density_(0.0) * f(0.0);
        for (int i = 1; i < panels; ++i) {
            const double theta = -tau_ + i * h;
            acc += density_(theta) * f(theta) * ((i % 2 == 1) ? 4.0 : 2.0);
        }
        return acc * h / 3.0;
    }

    void validate() const {
        double mass = density_mass_;
        for (const Atom& a : atoms_) {
            if (a.theta < -tau_ - 1e-12 || a.theta > 1e-12)
                throw domain_error("DelayWeight: atom location outside [-tau, 0]");
            if (a.mass < 0.0) throw domain_error("DelayWeight: atom mass must be >= 0");
            mass += a.mass;
        }
        if (std::abs(mass - 1.0) > 1e-10)
            throw domain_error("DelayWeight: total mass must equal 1 (got " +
                               std::to_string(mass) + ")");
    }

    double tau_;
    std::function<double(double)> density_;
    double density_mass_ = 0.0;
    std::vector<Atom> atoms_;
};

}  // namespace ntci
