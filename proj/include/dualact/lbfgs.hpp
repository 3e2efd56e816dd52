// Compact two-loop L-BFGS with Armijo backtracking, shared by the dual-action
// minimizer and the ratio descent.

#pragma once

#include <functional>

#include "dualact/vecops.hpp"

namespace dualact {

struct LbfgsOptions {
    int memory = 10;
    int max_iter = 500;
    double grad_tol = 1e-9;       // on the max norm of the gradient
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    int max_line_search = 50;
    double rel_change_tol = 0.0;  // optional stop on stagnating objective
    /// Armijo slack proportional to the rounding noise of the objective;
    /// keeps warm starts from dying in the noise floor before curvature
    /// pairs exist.
    double noise_eps = 2.220446049250313e-16;
    /// Stop after this many iterations without an above-noise improvement.
    int stall_patience = 40;
    /// Optional SPD initial-Hessian application (preconditioner) replacing
    /// the usual scaled identity in the two-loop recursion.
    std::function<void(Vec&)> apply_h0;
};

struct LbfgsResult {
    Vec x;
    double value = 0.0;
    double grad_max = 0.0;
    int iterations = 0;
    bool converged = false;
    bool line_search_failed = false;
    bool stagnated = false;   // ran out of certifiable progress above the noise
};

/// Minimizes f via fg(x, grad_out) -> value. The optional post_step hook is
/// applied to the iterate after each accepted step (projections,
/// renormalizations); returning false resets the quasi-Newton memory.
LbfgsResult lbfgs_minimize(const std::function<double(ConstSpan, Vec&)>& fg, Vec x0,
                           const LbfgsOptions& opts,
                           const std::function<bool(Vec&)>& post_step = {});

}  // namespace dualact
