#pragma once

#include <stdexcept>
#include <string>

namespace ntci {

// Input violates a documented precondition (bad argument value, range, ...).
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

// Two objects that must share structure (grid, dimension) do not.
class shape_error : public std::invalid_argument {
public:
    explicit shape_error(const std::string& what) : std::invalid_argument(what) {}
};

// A configuration is self-inconsistent or unsupported (not a runtime failure).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// A requested constant assembly has no finite answer under the declared
// hypotheses (e.g. a T-independent dL2 constant with lambda1 - lambda2 <= 0).
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

// The neutral-relation fixed point did not converge within max_iter.
class divergence_error : public std::runtime_error {
public:
    divergence_error(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

// A state became non-finite during integration.
class overflow_error : public std::runtime_error {
public:
    explicit overflow_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ntci
