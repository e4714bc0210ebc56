#pragma once

#include <stdexcept>
#include <string>

namespace bohm {

// Base class for every error thrown by this library.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad numeric input or an inconsistent configuration.
struct validation_error : error {
    using error::error;
};

// Operation that is not defined for this scenario kind, e.g. asking a
// density-only scenario for its wavefunction.
struct unsupported_error : error {
    using error::error;
};

// Quantile requested at P = 0 or P = 1 (the support edge sits at infinity
// for unbounded densities).
struct boundary_error : error {
    using error::error;
};

// A proposed point where the density exceeds the rejection bound. Signals
// a stale rho_max estimate on the caller side.
struct bound_violation_error : error {
    bound_violation_error(double x_, double rho_, double bound_)
        : error("density " + std::to_string(rho_) + " exceeds rejection bound " +
                std::to_string(bound_) + " at x = " + std::to_string(x_)),
          x(x_), rho(rho_), bound(bound_) {}
    double x;
    double rho;
    double bound;
};

// Evaluation inside a node region: rho fell below the velocity floor, where
// the velocity quotient is 0/0.
struct node_error : error {
    node_error(const std::string& msg, double x_, double t_, double rho_)
        : error(msg), x(x_), t(t_), rho(rho_) {}
    double x;
    double t;
    double rho;
};

} // namespace bohm
