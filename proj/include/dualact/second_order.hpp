// Phi-Laplacian periodic systems  d/dt grad Phi(q') + grad V(t, q) = 0,
// reduced to the Hamiltonian H(t, z) = Phi*(Lambda z2) + V(t, z1 / Lambda)
// and solved through the dual action; q = z1 / Lambda.

#pragma once

#include "dualact/dual_action.hpp"

namespace dualact {

struct PhiLaplacianProblem {
    GFunction phi;                                        // on R^N
    std::function<double(double, ConstSpan)> potential;   // V(t, q), convex in q
    std::function<Vec(double, ConstSpan)> potential_gradient;
    double period = 1.0;
    double lambda = -1.0;             // Lambda; <= 0 requests the automatic choice
    std::function<double(double)> gamma;   // upper-bound profile of V
    std::function<Vec(double)> l;          // lower-bound slope of V
    std::optional<double> cg_value;        // C_G(T) for G = Phi (+) Phi*, if known
};

/// 0.9 of the largest Lambda allowed by Lambda^{-1} > T max{1, C_G(T)/2};
/// estimates C_G when no value is supplied.
double resolve_lambda(const PhiLaplacianProblem& p);

/// The reduced Hamiltonian with its growth certificate
/// (G = Phi (+) Phi*, xi = (l/Lambda, 0)).
Hamiltonian to_hamiltonian(const PhiLaplacianProblem& p, double lambda_resolved);

struct PhiSolution {
    Trajectory q;
    double residual = 0.0;     // max_k | d/dt grad Phi(q') + grad V(t, q) |
    double lambda = 0.0;
    OrbitResult orbit;         // the underlying Hamiltonian solve
};

struct PhiSolveOptions {
    SolverOptions solver;
    HamiltonianConjugateOptions conjugate{.tol = 1e-13};  // the EL residual
    // differentiates the recovered momentum, amplifying conjugate noise
    double epsilon = -1.0;     // < 0: continuation from 1e-3 * Lambda
    bool waive_hypothesis_check = false;
    DerivRule rule = DerivRule::Spectral;
};

PhiSolution solve_phi_laplacian(const PhiLaplacianProblem& p, int n_samples,
                                const PhiSolveOptions& opts = {});

}  // namespace dualact
