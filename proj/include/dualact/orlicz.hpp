// Discretized Orlicz-space numerics on periodic trajectories: modulars,
// Luxemburg norms and the standard inequality verifiers.

#pragma once

#include "dualact/gfunction.hpp"
#include "dualact/trajectory.hpp"

namespace dualact {

/// Rectangle-rule quadrature of the modular integral of G along u; equals the
/// trapezoid rule on a periodic uniform grid.
double modular(const GFunction& g, const Trajectory& u);

struct LuxemburgError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// inf { lambda > 0 : modular(u / lambda) <= 1 }, by bisection on a bracket
/// grown geometrically from 1. Returns 0 for the zero trajectory.
double luxemburg_norm(const GFunction& g, const Trajectory& u, double tol = 1e-10);

struct NormModularReport {
    double norm;
    double modular_value;
    double upper_slack;       // modular + 1 - norm  (>= 0 expected)
    double lower_slack;       // modular - norm when norm > 1, else +inf
    bool passed;
};
NormModularReport norm_modular_bound(const GFunction& g, const Trajectory& u);

struct HolderReport {
    double integral;          // int <u, v> dt
    double bound;             // 2 |u|_G |v|_{G*}
    double ratio;             // integral / bound (0 when bound == 0)
    bool passed;
};
HolderReport holder_check(const GFunction& g, const Trajectory& u, const Trajectory& v);

struct PoincareWirtingerReport {
    double lhs;               // int G(tilde u) dt
    double rhs;               // int G(T du/dt) dt
    bool passed;
};
PoincareWirtingerReport poincare_wirtinger_check(const GFunction& g, const Trajectory& u,
                                                 double quad_tol = 1e-9);

}  // namespace dualact
