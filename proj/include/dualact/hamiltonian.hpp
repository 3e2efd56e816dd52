// Time-dependent convex Hamiltonians H(t, u) on R^{2n} with optional growth
// certificates, node-wise Fenchel conjugation and the epsilon-perturbation
// H_eps(t, u) = H(t, u) + G(eps u).

#pragma once

#include <functional>
#include <optional>

#include "dualact/gfunction.hpp"

namespace dualact {

/// Certificate for G(lambda u) - beta(t) <= H(t, u) <= G(Lambda u) + gamma(t)
/// together with the lower-bound slope H(t, u) >= <xi(t), u>.
struct GrowthCertificate {
    GFunction g;
    double lambda = 0.0;
    double big_lambda = 0.0;
    std::function<double(double)> beta;    // integrable profile, may be null (== 0)
    std::function<double(double)> gamma;   // integrable profile, may be null (== 0)
    std::function<Vec(double)> xi;         // null means xi == 0

    double beta_at(double t) const { return beta ? beta(t) : 0.0; }
    double gamma_at(double t) const { return gamma ? gamma(t) : 0.0; }
    Vec xi_at(double t, int dim) const { return xi ? xi(t) : Vec(dim, 0.0); }
};

class Hamiltonian {
public:
    using Eval = std::function<double(double, ConstSpan)>;
    using Grad = std::function<Vec(double, ConstSpan)>;
    /// Closed-form conjugate: returns (H*(t, v), argmax u).
    using Conj = std::function<std::pair<double, Vec>(double, ConstSpan)>;

    Hamiltonian() = default;
    Hamiltonian(int dim, Eval eval, Grad grad) : dim_(dim), eval_(std::move(eval)), grad_(std::move(grad)) {}

    int dim() const { return dim_; }
    double value(double t, ConstSpan u) const { return eval_(t, u); }
    Vec gradient(double t, ConstSpan u) const { return grad_(t, u); }

    bool has_closed_conjugate() const { return static_cast<bool>(conj_); }
    void set_closed_conjugate(Conj c) { conj_ = std::move(c); }
    std::pair<double, Vec> closed_conjugate(double t, ConstSpan v) const { return conj_(t, v); }

    std::optional<GrowthCertificate> growth;

    /// Autonomous Hamiltonian H(t, u) = G(u); conjugate comes from G*.
    static Hamiltonian from_gfunction(const GFunction& g);

private:
    int dim_ = 0;
    Eval eval_;
    Grad grad_;
    Conj conj_;
};

struct HamiltonianConjugateOptions {
    double tol = 1e-11;
    int max_newton = 100;
    int max_ascent = 400;
};

/// sup_u <u, v> - H(t, u), solved by damped Newton on grad_u H(t, u) = v.
/// Throws ConjugateSolveError on non-convergence (carrying t, v and a trace).
ConjugatePoint hamiltonian_conjugate(const Hamiltonian& h, double t, ConstSpan v,
                                     const Vec* warm_start = nullptr,
                                     const HamiltonianConjugateOptions& opts = {});

/// H_eps(t, u) = H(t, u) + G(eps u); gradient grad H + eps grad G(eps u).
/// The growth certificate is widened using the fixed interior ratio r = 1/2:
/// lower bound G((1-r) eps u) - G*(xi / (r eps)), upper bound G((1+r) Lambda u).
Hamiltonian perturbed_hamiltonian(const Hamiltonian& h, const GFunction& g, double epsilon);

/// Sampled check of the certificate sandwich on random (t, u) pairs.
struct CertificateCheck {
    bool passed = true;
    double worst_violation = 0.0;
    Vec witness;
    double witness_t = 0.0;
};
CertificateCheck verify_growth_certificate(const Hamiltonian& h, double period,
                                           int n_samples = 200, uint64_t seed = 31);

}  // namespace dualact
