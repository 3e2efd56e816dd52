// Discretized Clarke dual action for a perturbed Hamiltonian:
//
//   chi_eps(v) = int_0^T  1/2 <J v', v> + H_eps*(t, v') dt,
//
// minimized over mean-zero T-periodic trajectories. Critical points recover
// the primal orbit u = grad H_eps*(t, v'), which solves u' = J grad H_eps(t, u).

#pragma once

#include <optional>

#include "dualact/hamiltonian.hpp"
#include "dualact/trajectory.hpp"

namespace dualact {

struct SolverOptions {
    double grad_tol = 1e-8;   // max over nodes of |J v' - u'| (the gradient field)
    /// Accepted when the line search can no longer certify descent against
    /// floating-point noise; failure only beyond this.
    double stall_grad_tol = 1e-6;
    int max_iter = 2000;
    int lbfgs_memory = 12;
};

struct DualActionProblem {
    Hamiltonian h;
    double period = 1.0;
    double epsilon = 0.0;
    int n_samples = 128;
    DerivRule rule = DerivRule::Spectral;
    SolverOptions solver;
    HamiltonianConjugateOptions conjugate;
    bool waive_hypothesis_check = false;
    /// C_{G*}(T) for the coercivity hypothesis; required for the check.
    std::optional<double> cg_star;
};

struct OrbitResult {
    Trajectory v;                  // mean-zero dual minimizer
    Trajectory u;                  // recovered primal orbit (mean included)
    double chi_value = 0.0;
    double grad_norm = 0.0;        // max-node norm of the dual-action gradient field
    double hamiltonian_residual = 0.0;   // max_k |J u' + grad H(t_k, u_k)|
    double perturbed_residual = 0.0;     // same against H_eps
    double duality_gap = 0.0;            // max_k |u' - J v'|
    int iterations = 0;
    double epsilon_used = 0.0;
    bool stalled = false;                // stopped at the noise floor above grad_tol
};

struct SolverError : std::runtime_error {
    Trajectory last_iterate;
    SolverError(const std::string& msg, Trajectory v)
        : std::runtime_error(msg), last_iterate(std::move(v)) {}
};

struct HypothesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// chi_eps at v (projected onto mean-zero first).
double dual_action_value(const DualActionProblem& p, const Trajectory& v);

/// L2-representer of the Gateaux derivative: the trajectory whose nodes are
/// (J v' - u')_k with u_k the node-wise conjugate maximizer, mean projected
/// out. Directional derivatives are quadrature inner products against it.
Trajectory dual_action_gradient(const DualActionProblem& p, const Trajectory& v);

OrbitResult minimize_dual_action(const DualActionProblem& p,
                                 const std::optional<Trajectory>& v0 = std::nullopt);

struct HypothesisReport {
    bool h1 = false;
    bool h2 = false;          // Lambda^{-1} > T max{1, C_{G*}(T)/2}
    bool h2_sharp = false;    // Matuszewska-Orlicz index refinement
    bool h3 = false;
    double lambda_inv = 0.0;
    double h2_threshold = 0.0;
    double sharp_lhs = 0.0;
    double sharp_rhs = 0.0;
    std::string detail;

    bool passed() const { return h1 && (h2 || h2_sharp) && h3; }
};

/// (H1) H(t,u) >= <xi(t), u> on samples; (H2) the coercivity bound through
/// cg_star = C_{G*}(T), plus its growth-index sharpening; (H3) int H(t, u) dt
/// grows monotonically along rays at radii {10, 100, 1000}.
HypothesisReport check_existence_hypotheses(const Hamiltonian& h, double period, double cg_star,
                                            uint64_t seed = 17);

struct ContinuationOptions {
    double epsilon0 = -1.0;      // < 0: 1e-3 * Lambda from the certificate
    double shrink = 0.1;
    double movement_tol = 1e-8;  // stop when successive orbits move less than this
    int max_stages = 6;
};

/// Repeats the minimization along epsilon -> epsilon/10, warm-starting each
/// stage from the previous minimizer.
OrbitResult solve_with_continuation(DualActionProblem p, const ContinuationOptions& opts = {});

/// Work-pool width: min(hardware, DUAL_ACTION_THREADS); defaults to 1 so that
/// results never depend on the environment unless explicitly requested.
int configured_threads();

}  // namespace dualact
