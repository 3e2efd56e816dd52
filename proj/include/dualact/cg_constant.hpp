// Estimation and certification of the optimal constant C_G(T) in
//
//   int_0^T <J u', u> dt  >=  -C_G(T) int_0^T G(T u') dt
//
// over T-periodic trajectories: direct ratio minimization, the constrained
// problem (minimize f subject to g = gamma), the characterization through
// periodic orbits of u' = J grad G(u), closed forms for scalar power pairs,
// and the Simonenko-index sandwich.

#pragma once

#include <optional>
#include <utility>

#include "dualact/gfunction.hpp"
#include "dualact/trajectory.hpp"

namespace dualact {

struct CgEstimate {
    double value = 0.0;
    double period = 1.0;
    std::string method;                               // ratio-minimization | gamma-sweep |
                                                      // flow-characterization | closed-form
    Trajectory certificate_orbit;
    std::vector<std::pair<double, double>> gamma_record;   // (gamma, A(gamma)/gamma)
    /// 2T-estimate rescaled back to T via C_G(T) = C_G(1)/T; NaN if skipped.
    double scaling_check = std::numeric_limits<double>::quiet_NaN();
};

struct CgOptions {
    int restarts = 8;
    uint64_t seed = 2024;
    int max_iter = 3000;
    double grad_tol = 1e-10;
    bool cross_check_scaling = false;
    bool require_symplectic = true;
};

/// Minimizes the ratio f(u)/int G(T u') over mean-zero trajectories,
/// multi-started; returns -(best ratio) with the certifying orbit.
CgEstimate estimate_cg_ratio(const GFunction& g, double period, int n_samples, int restarts,
                             uint64_t seed = 2024);
CgEstimate estimate_cg_ratio(const GFunction& g, double period, int n_samples,
                             const CgOptions& opts);

struct ConstrainedSolution {
    double a_gamma = 0.0;           // f at the minimizer, negative
    Trajectory u;
    double lambda = 0.0;            // multiplier of J u' + lambda (grad G(u'))' = 0
    double constraint_residual = 0.0;
    double stationarity_residual = 0.0;
};

/// Problem (minimize int <J u', u> subject to int G(u') = gamma) on [0, T] via
/// an augmented Lagrangian. Throws on an infeasible constraint or a
/// nonnegative multiplier (a spurious stationary point).
ConstrainedSolution solve_constrained_p(const GFunction& g, double gamma, double period,
                                        int n_samples, int restarts = 4, uint64_t seed = 5);

struct PeriodicOrbit {
    Trajectory u;          // one period, resampled uniformly
    double period = 0.0;
    double energy = 0.0;   // G along the orbit
    double energy_drift = 0.0;
};

struct FlowOptions {
    double reference_period = 2.0 * 3.14159265358979323846;
    double step = -1.0;       // default reference_period / 2^20
    double max_time = -1.0;   // default 8 * reference_period
    double return_tol = 1e-8; // phase-space distance accepted at first return
    double energy_tol = 1e-6; // relative conservation guard
    int resample = 256;
};

struct FlowResult {
    PeriodicOrbit orbit;
    double ratio = 0.0;   // (1/T_u) int <grad G(u), u> / int G*(grad G(u))
    long steps = 0;
};

struct PeriodNotDetected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Integrates u' = J grad G(u) (implicit midpoint) from u0, detects the first
/// return through the Poincare section orthogonal to the initial velocity and
/// evaluates the orbit ratio whose supremum characterizes C_G.
FlowResult flow_characterization(const GFunction& g, const Vec& u0, const FlowOptions& opts = {});

/// Isochronous period of the scalar p-Laplacian oscillator,
/// 4 pi (p-1)^{1/p} / (p sin(pi/p)); agrees with the Beta-function form.
double period_formula(double p);
double period_formula_beta(double p);

/// p sin(pi/p) / (2 pi (p-1)^{1/p}) = 2 / T_p for |u1|^p/p + |u2|^q/q, n = 1.
double cg_closed_form(double p);

struct LowerBoundReport {
    int trials = 0;
    int violations = 0;
    double c1 = 0.0;
    double c2 = 0.0;
    double worst_margin = std::numeric_limits<double>::infinity();  // min lhs - rhs
    double worst_ratio = std::numeric_limits<double>::infinity();   // min lhs / int G(Tu')
    std::optional<Trajectory> offending;
};

/// Random band-limited sweep of the lower bound with (C1, C2) = (2/T, 0) in
/// the symplectic case, or constants derived from a semi-symplectic
/// certificate (C1 = 2K/T, C2 = K C / T).
LowerBoundReport quadratic_form_lower_bound(const GFunction& g, int trials, double period,
                                            int n_samples = 64, uint64_t seed = 77,
                                            std::optional<std::pair<double, double>> constants =
                                                std::nullopt);

struct SandwichReport {
    double lower = 0.0;          // p(G) / inf T_u
    double upper = 0.0;          // q(G) / inf T_u
    double inf_period = 0.0;
    double estimate = 0.0;
    bool contains_estimate = false;
    bool single_orbit = false;   // inf taken over one orbit only
};

SandwichReport simonenko_sandwich(const GFunction& g, const std::vector<PeriodicOrbit>& orbits,
                                  double estimate);

}  // namespace dualact
