#include "dualact/hamiltonian.hpp"

#include <cmath>
#include <sstream>

namespace dualact {

Hamiltonian Hamiltonian::from_gfunction(const GFunction& g) {
    Hamiltonian h(
        g.dim(), [g](double, ConstSpan u) { return g.value(u); },
        [g](double, ConstSpan u) { return g.gradient(u); });
    const GFunction star = g.conjugate();
    if (g.conjugate_is_closed_form()) {
        h.set_closed_conjugate([star](double, ConstSpan v) {
            return std::make_pair(star.value(v), star.gradient(v));
        });
    }
    return h;
}

ConjugatePoint hamiltonian_conjugate(const Hamiltonian& h, double t, ConstSpan v,
                                     const Vec* warm_start, const HamiltonianConjugateOptions& opts) {
    if (h.has_closed_conjugate()) {
        auto [value, argmax] = h.closed_conjugate(t, v);
        return ConjugatePoint{value, std::move(argmax), 0};
    }
    // Freeze t and reuse the G-function maximizer.
    GFunction frozen = GFunction::custom(
        h.dim(), [&h, t](ConstSpan u) { return h.value(t, u); },
        [&h, t](ConstSpan u) { return h.gradient(t, u); }, "hamiltonian_slice");
    NumericalConjugateOptions nopts;
    nopts.tol = opts.tol;
    nopts.max_newton = opts.max_newton;
    nopts.max_ascent = opts.max_ascent;
    try {
        return numerical_conjugate_point(frozen, v, warm_start, nopts);
    } catch (const ConjugateSolveError& e) {
        std::ostringstream msg;
        msg << e.what() << " (at t=" << t << ")";
        throw ConjugateSolveError(msg.str(), e.query, e.trace);
    }
}

Hamiltonian perturbed_hamiltonian(const Hamiltonian& h, const GFunction& g, double epsilon) {
    require_dim(h.dim(), static_cast<size_t>(g.dim()), "perturbed_hamiltonian");
    if (epsilon == 0.0) return h;
    if (epsilon < 0.0) throw std::invalid_argument("perturbed_hamiltonian: epsilon must be >= 0");

    Hamiltonian hp(
        h.dim(),
        [h, g, epsilon](double t, ConstSpan u) {
            Vec eu(u.begin(), u.end());
            scale(epsilon, eu);
            return h.value(t, u) + g.value(eu);
        },
        [h, g, epsilon](double t, ConstSpan u) {
            Vec eu(u.begin(), u.end());
            scale(epsilon, eu);
            Vec grad = h.gradient(t, u);
            axpy(epsilon, g.gradient(eu), grad);
            return grad;
        });

    if (h.growth) {
        constexpr double r = 0.5;
        GrowthCertificate cert = *h.growth;
        GrowthCertificate widened;
        widened.g = cert.g;
        widened.lambda = (1.0 - r) * epsilon;
        widened.big_lambda = (1.0 + r) * cert.big_lambda;
        widened.gamma = [cert](double t) { return cert.gamma_at(t); };
        const GFunction star = cert.g.conjugate();
        const int dim = h.dim();
        widened.beta = [cert, star, epsilon, dim](double t) {
            Vec x = cert.xi_at(t, dim);
            scale(1.0 / (r * epsilon), x);
            return star.value(x);
        };
        widened.xi = cert.xi;
        hp.growth = std::move(widened);
    }
    return hp;
}

CertificateCheck verify_growth_certificate(const Hamiltonian& h, double period, int n_samples,
                                           uint64_t seed) {
    if (!h.growth) throw std::invalid_argument("verify_growth_certificate: no certificate");
    const GrowthCertificate& cert = *h.growth;
    Rng rng(seed);
    std::uniform_real_distribution<double> ut(0.0, period);
    auto pts = sample_points(rng, h.dim(), n_samples);

    CertificateCheck check;
    for (const auto& u : pts) {
        const double t = ut(rng);
        const double hv = h.value(t, u);
        Vec bu = u;
        scale(cert.big_lambda, bu);
        const double upper = cert.g.value(bu) + cert.gamma_at(t);
        double viol = hv - upper;
        if (cert.lambda > 0.0) {  // lambda == 0 means no power lower bound claimed
            Vec lu = u;
            scale(cert.lambda, lu);
            viol = std::max(viol, cert.g.value(lu) - cert.beta_at(t) - hv);
        }
        if (viol > check.worst_violation) {
            check.worst_violation = viol;
            check.witness = u;
            check.witness_t = t;
        }
    }
    check.passed = check.worst_violation <= 1e-9;
    return check;
}

}  // namespace dualact
