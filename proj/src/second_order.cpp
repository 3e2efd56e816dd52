#include "dualact/second_order.hpp"

#include <cmath>

#include "dualact/cg_constant.hpp"

namespace dualact {

namespace {

GFunction phase_gfunction(const GFunction& phi) {
    return GFunction::direct_sum({phi, phi.conjugate()});
}

}  // namespace

double resolve_lambda(const PhiLaplacianProblem& p) {
    if (p.lambda > 0.0) return p.lambda;
    double cg = 0.0;
    if (p.cg_value) {
        cg = *p.cg_value;
    } else {
        CgOptions opts;
        opts.restarts = 4;
        opts.max_iter = 1500;
        opts.seed = 404;
        cg = estimate_cg_ratio(phase_gfunction(p.phi), p.period, 64, opts).value;
    }
    const double lambda = 0.9 / (p.period * std::max(1.0, cg / 2.0));

    // Re-verify the upper bound V(t, q) <= Phi(Lambda^2 q) + gamma(t).
    Rng rng(2718);
    std::uniform_real_distribution<double> ut(0.0, p.period);
    auto pts = sample_points(rng, p.phi.dim(), 200);
    for (const auto& q : pts) {
        const double t = ut(rng);
        Vec lq = q;
        scale(lambda * lambda, lq);
        const double bound = p.phi.value(lq) + (p.gamma ? p.gamma(t) : 0.0);
        if (p.potential(t, q) > bound + 1e-9 * (1.0 + std::abs(bound)))
            throw std::runtime_error(
                "resolve_lambda: automatic Lambda violates the potential upper bound; "
                "supply Lambda explicitly");
    }
    return lambda;
}

Hamiltonian to_hamiltonian(const PhiLaplacianProblem& p, double lambda_resolved) {
    const int nq = p.phi.dim();
    const double lam = lambda_resolved;
    const GFunction phi_star = p.phi.conjugate();
    auto v = p.potential;
    auto dv = p.potential_gradient;

    Hamiltonian h(
        2 * nq,
        [phi_star, v, lam, nq](double t, ConstSpan z) {
            Vec z2(nq);
            Vec q(nq);
            for (int j = 0; j < nq; ++j) {
                q[j] = z[j] / lam;
                z2[j] = lam * z[nq + j];
            }
            return phi_star.value(z2) + v(t, q);
        },
        [phi_star, dv, lam, nq](double t, ConstSpan z) {
            Vec z2(nq);
            Vec q(nq);
            for (int j = 0; j < nq; ++j) {
                q[j] = z[j] / lam;
                z2[j] = lam * z[nq + j];
            }
            Vec grad(2 * nq);
            const Vec gv = dv(t, q);
            const Vec gs = phi_star.gradient(z2);
            for (int j = 0; j < nq; ++j) {
                grad[j] = gv[j] / lam;
                grad[nq + j] = lam * gs[j];
            }
            return grad;
        });

    // The conjugate splits over the blocks: the momentum part has the exact
    // closed form H2*(w2) = Phi(w2/Lambda), so only the potential block needs
    // an inner solve (on a smooth function of dimension N instead of 2N).
    const GFunction phi_copy = p.phi;
    auto v_fn = p.potential;
    auto dv_fn = p.potential_gradient;
    h.set_closed_conjugate([phi_copy, v_fn, dv_fn, lam, nq](double t, ConstSpan w) {
        Vec y(nq);
        for (int j = 0; j < nq; ++j) y[j] = w[nq + j] / lam;
        const double momentum_value = phi_copy.value(y);
        Vec z2 = phi_copy.gradient(y);
        scale(1.0 / lam, z2);

        // sup_{z1} <z1, w1> - V(t, z1/Lambda) = sup_q <q, Lambda w1> - V(t, q)
        const GFunction slice = GFunction::custom(
            nq, [&v_fn, t](ConstSpan q) { return v_fn(t, q); },
            [&dv_fn, t](ConstSpan q) { return dv_fn(t, q); }, "potential_slice");
        Vec target(nq);
        for (int j = 0; j < nq; ++j) target[j] = lam * w[j];
        const ConjugatePoint pt = numerical_conjugate_point(slice, target);

        Vec argmax(2 * nq);
        for (int j = 0; j < nq; ++j) {
            argmax[j] = lam * pt.argmax[j];
            argmax[nq + j] = z2[j];
        }
        return std::make_pair(momentum_value + pt.value, std::move(argmax));
    });

    GrowthCertificate cert;
    cert.g = phase_gfunction(p.phi);
    cert.big_lambda = lam;
    cert.lambda = 0.0;  // no power lower bound is claimed; (H1) carries the slope
    cert.gamma = p.gamma;
    if (p.l) {
        auto l = p.l;
        cert.xi = [l, lam, nq](double t) {
            Vec xi(2 * nq, 0.0);
            const Vec lt = l(t);
            for (int j = 0; j < nq; ++j) xi[j] = lt[j] / lam;
            return xi;
        };
    }
    h.growth = std::move(cert);
    return h;
}

PhiSolution solve_phi_laplacian(const PhiLaplacianProblem& p, int n_samples,
                                const PhiSolveOptions& opts) {
    const double lam = resolve_lambda(p);
    DualActionProblem dp;
    dp.h = to_hamiltonian(p, lam);
    dp.period = p.period;
    dp.n_samples = n_samples;
    dp.rule = opts.rule;
    dp.solver = opts.solver;
    dp.conjugate = opts.conjugate;
    dp.waive_hypothesis_check = opts.waive_hypothesis_check;
    if (p.cg_value) dp.cg_star = *p.cg_value;  // G symplectic: C_{G*} = C_G

    PhiSolution sol;
    sol.lambda = lam;
    if (opts.epsilon >= 0.0) {
        dp.epsilon = opts.epsilon;
        sol.orbit = minimize_dual_action(dp);
    } else {
        ContinuationOptions copts;
        sol.orbit = solve_with_continuation(dp, copts);
    }

    const int nq = p.phi.dim();
    sol.q = Trajectory(p.period, n_samples, nq, opts.rule);
    for (int k = 0; k < n_samples; ++k)
        for (int j = 0; j < nq; ++j) sol.q.at(k, j) = sol.orbit.u.at(k, j) / lam;

    // (EL) residual with the same discrete derivative rule.
    const Trajectory dq = sol.q.derivative();
    Vec field(static_cast<size_t>(n_samples) * nq);
    for (int k = 0; k < n_samples; ++k) {
        const Vec gp = p.phi.gradient(dq.node(k));
        std::copy(gp.begin(), gp.end(), field.begin() + static_cast<size_t>(k) * nq);
    }
    const Vec dfield = periodic_derivative(field, n_samples, nq, p.period, opts.rule);
    double resid = 0.0;
    for (int k = 0; k < n_samples; ++k) {
        const Vec gv = p.potential_gradient(p.period * k / n_samples, sol.q.node(k));
        double s = 0.0;
        for (int j = 0; j < nq; ++j) {
            const double r = dfield[static_cast<size_t>(k) * nq + j] + gv[j];
            s += r * r;
        }
        resid = std::max(resid, std::sqrt(s));
    }
    sol.residual = resid;
    return sol;
}

}  // namespace dualact
