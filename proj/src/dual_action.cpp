#include "dualact/dual_action.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "dualact/lbfgs.hpp"

namespace dualact {

namespace {

constexpr double kInteriorRatio = 0.5;  // the auxiliary 0 < r < 1 of the perturbation

Hamiltonian effective_hamiltonian(const DualActionProblem& p) {
    if (p.epsilon == 0.0) return p.h;
    if (!p.h.growth)
        throw std::invalid_argument(
            "dual action: epsilon > 0 requires a growth certificate supplying G");
    return perturbed_hamiltonian(p.h, p.h.growth->g, p.epsilon);
}

void project_mean(Vec& values, int n, int dim) {
    for (int j = 0; j < dim; ++j) {
        double m = 0.0;
        for (int k = 0; k < n; ++k) m += values[static_cast<size_t>(k) * dim + j];
        m /= n;
        for (int k = 0; k < n; ++k) values[static_cast<size_t>(k) * dim + j] -= m;
    }
}

/// Fourier-diagonal preconditioner 1 / (1 + omega_k^2): flattens the
/// O(omega^2) growth of the dual-action Hessian across modes.
void apply_mode_preconditioner(Vec& values, int n, int dim, double period) {
    std::vector<std::complex<double>> buf(n);
    for (int j = 0; j < dim; ++j) {
        for (int k = 0; k < n; ++k) buf[k] = values[static_cast<size_t>(k) * dim + j];
        fourier_transform(buf, false);
        for (int k = 0; k < n; ++k) {
            const int m = k <= n / 2 ? k : k - n;
            const double omega = 2.0 * std::numbers::pi * m / period;
            buf[k] /= 1.0 + omega * omega;
        }
        fourier_transform(buf, true);
        for (int k = 0; k < n; ++k) values[static_cast<size_t>(k) * dim + j] = buf[k].real();
    }
}

void run_nodes(int n, bool parallel, const std::function<void(int)>& body) {
    const int threads = parallel ? configured_threads() : 1;
    if (threads <= 1 || n < 64) {
        for (int k = 0; k < n; ++k) body(k);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int k = next.fetch_add(1); k < n; k = next.fetch_add(1)) body(k);
        });
    for (auto& th : pool) th.join();
}

/// One pass over the grid: node conjugates, action value and gradient field.
struct ChiEvaluation {
    double chi = 0.0;
    Vec grad_field;        // (J v' - u')_k, mean projected; empty if not requested
    Vec u_values;          // node-wise maximizers
    Vec dv;                // v'
};

ChiEvaluation evaluate_chi(const DualActionProblem& p, const Hamiltonian& heps, ConstSpan v,
                           std::vector<Vec>* warm, bool want_gradient) {
    const int n = p.n_samples;
    const int d = p.h.dim();
    const double w = p.period / n;

    ChiEvaluation ev;
    ev.dv = periodic_derivative(v, n, d, p.period, p.rule);
    ev.u_values.assign(static_cast<size_t>(n) * d, 0.0);

    Vec conj_values(n, 0.0);
    std::exception_ptr failure;
    std::mutex failure_mutex;

    run_nodes(n, !heps.has_closed_conjugate(), [&](int k) {
        try {
            const double t = p.period * k / n;
            ConstSpan vk(ev.dv.data() + static_cast<size_t>(k) * d, d);
            const Vec* start = (warm && !(*warm)[k].empty()) ? &(*warm)[k] : nullptr;
            ConjugatePoint pt = hamiltonian_conjugate(heps, t, vk, start, p.conjugate);
            conj_values[k] = pt.value;
            std::copy(pt.argmax.begin(), pt.argmax.end(),
                      ev.u_values.begin() + static_cast<size_t>(k) * d);
            if (warm) (*warm)[k] = std::move(pt.argmax);
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);

    double chi = 0.0;
    Vec jdv(static_cast<size_t>(n) * d);
    for (int k = 0; k < n; ++k) {
        ConstSpan vk(v.data() + static_cast<size_t>(k) * d, d);
        MutSpan jk(jdv.data() + static_cast<size_t>(k) * d, d);
        apply_J(ConstSpan(ev.dv.data() + static_cast<size_t>(k) * d, d), jk);
        chi += 0.5 * dot(jk, vk) + conj_values[k];
    }
    ev.chi = w * chi;

    if (want_gradient) {
        // d/dv of the quadrature sum:  1/2 (J D v - D^T J v) + D^T u,
        // which collapses to J v' - u' for the antisymmetric spectral rule.
        Vec jv(static_cast<size_t>(n) * d);
        for (int k = 0; k < n; ++k)
            apply_J(ConstSpan(v.data() + static_cast<size_t>(k) * d, d),
                    MutSpan(jv.data() + static_cast<size_t>(k) * d, d));
        const Vec dtjv = periodic_derivative_transpose(jv, n, d, p.period, p.rule);
        const Vec dtu = periodic_derivative_transpose(ev.u_values, n, d, p.period, p.rule);
        ev.grad_field.resize(static_cast<size_t>(n) * d);
        for (size_t i = 0; i < ev.grad_field.size(); ++i)
            ev.grad_field[i] = 0.5 * (jdv[i] - dtjv[i]) + dtu[i];
        project_mean(ev.grad_field, n, d);
    }
    return ev;
}

void validate_problem(const DualActionProblem& p) {
    if (p.epsilon < 0.0) throw std::invalid_argument("dual action: epsilon must be >= 0");
    if (p.h.growth && p.epsilon > 0.0 && p.epsilon >= kInteriorRatio * p.h.growth->big_lambda)
        throw std::invalid_argument("dual action: epsilon must stay below r * Lambda");
    if (p.waive_hypothesis_check) return;
    if (!p.h.growth || !p.cg_star)
        throw std::invalid_argument(
            "dual action: hypothesis check needs a growth certificate and cg_star; "
            "set waive_hypothesis_check to skip");
    const HypothesisReport rep = check_existence_hypotheses(p.h, p.period, *p.cg_star);
    if (!rep.passed()) throw HypothesisError("existence hypotheses failed:\n" + rep.detail);
}

}  // namespace

int configured_threads() {
    const char* env = std::getenv("DUAL_ACTION_THREADS");
    if (!env) return 1;
    const int requested = std::atoi(env);
    if (requested <= 1) return 1;
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    return std::min(requested, std::max(1, hw));
}

double dual_action_value(const DualActionProblem& p, const Trajectory& v) {
    require_dim(p.h.dim(), static_cast<size_t>(v.dim()), "dual_action_value");
    Trajectory vz = v.tilde();
    const Hamiltonian heps = effective_hamiltonian(p);
    return evaluate_chi(p, heps, vz.values(), nullptr, false).chi;
}

Trajectory dual_action_gradient(const DualActionProblem& p, const Trajectory& v) {
    Trajectory vz = v.tilde();
    const Hamiltonian heps = effective_hamiltonian(p);
    ChiEvaluation ev = evaluate_chi(p, heps, vz.values(), nullptr, true);
    Trajectory g(p.period, p.n_samples, p.h.dim(), p.rule);
    g.values() = std::move(ev.grad_field);
    return g;
}

OrbitResult minimize_dual_action(const DualActionProblem& p, const std::optional<Trajectory>& v0) {
    validate_problem(p);
    const Hamiltonian heps = effective_hamiltonian(p);
    const int n = p.n_samples;
    const int d = p.h.dim();
    const double w = p.period / n;

    Vec x(static_cast<size_t>(n) * d, 0.0);
    if (v0) {
        require_dim(d, static_cast<size_t>(v0->dim()), "minimize_dual_action v0");
        if (v0->samples() != n || std::abs(v0->period() - p.period) > 1e-12 * p.period)
            throw std::invalid_argument("minimize_dual_action: v0 grid mismatch");
        x = v0->values();
        project_mean(x, n, d);
    }

    std::vector<Vec> warm(n);
    auto fg = [&](ConstSpan xv, Vec& grad) {
        ChiEvaluation ev = evaluate_chi(p, heps, xv, &warm, true);
        grad = std::move(ev.grad_field);
        scale(w, grad);  // coefficient gradient of the quadrature sum
        return ev.chi;
    };

    LbfgsOptions lopts;
    lopts.memory = p.solver.lbfgs_memory;
    lopts.max_iter = p.solver.max_iter;
    // terminate on the node-wise 2-norm grad_tol of the field
    lopts.grad_tol = w * p.solver.grad_tol / std::sqrt(static_cast<double>(d));
    lopts.apply_h0 = [n, d, T = p.period](Vec& v2) {
        apply_mode_preconditioner(v2, n, d, T);
    };
    auto project = [&](Vec& xv) {
        project_mean(xv, n, d);
        return true;
    };

    LbfgsResult lr = lbfgs_minimize(fg, std::move(x), lopts, project);

    Trajectory v(p.period, n, d, p.rule);
    v.values() = lr.x;

    const double field_grad = lr.grad_max / w;
    const bool stalled = !lr.converged && field_grad * std::sqrt(static_cast<double>(d)) <=
                                              p.solver.stall_grad_tol;
    if (!lr.converged && !stalled) {
        std::ostringstream msg;
        msg << "dual action minimization did not converge: gradient " << field_grad
            << " after " << lr.iterations << " iterations"
            << (lr.line_search_failed ? " (line search failure)" : "");
        throw SolverError(msg.str(), std::move(v));
    }

    ChiEvaluation ev = evaluate_chi(p, heps, v.values(), &warm, true);
    OrbitResult out;
    out.stalled = stalled;
    out.v = v;
    out.u = Trajectory(p.period, n, d, p.rule);
    out.u.values() = ev.u_values;
    out.chi_value = ev.chi;
    out.grad_norm = 0.0;
    for (int k = 0; k < n; ++k)
        out.grad_norm = std::max(
            out.grad_norm, norm2(ConstSpan(ev.grad_field.data() + static_cast<size_t>(k) * d, d)));
    out.iterations = lr.iterations;
    out.epsilon_used = p.epsilon;

    const Vec du = periodic_derivative(out.u.values(), n, d, p.period, p.rule);
    Vec jdu(d), jdv(d);
    for (int k = 0; k < n; ++k) {
        const double t = p.period * k / n;
        ConstSpan uk(out.u.values().data() + static_cast<size_t>(k) * d, d);
        ConstSpan duk(du.data() + static_cast<size_t>(k) * d, d);
        apply_J(duk, jdu);
        Vec gh = p.h.gradient(t, uk);
        Vec ghe = heps.gradient(t, uk);
        double r1 = 0.0, r2 = 0.0, r3 = 0.0;
        ConstSpan dvk(ev.dv.data() + static_cast<size_t>(k) * d, d);
        apply_J(dvk, jdv);
        for (int j = 0; j < d; ++j) {
            r1 += (jdu[j] + gh[j]) * (jdu[j] + gh[j]);
            r2 += (jdu[j] + ghe[j]) * (jdu[j] + ghe[j]);
            r3 += (duk[j] - jdv[j]) * (duk[j] - jdv[j]);
        }
        out.hamiltonian_residual = std::max(out.hamiltonian_residual, std::sqrt(r1));
        out.perturbed_residual = std::max(out.perturbed_residual, std::sqrt(r2));
        out.duality_gap = std::max(out.duality_gap, std::sqrt(r3));
    }
    return out;
}

HypothesisReport check_existence_hypotheses(const Hamiltonian& h, double period, double cg_star,
                                            uint64_t seed) {
    if (!h.growth)
        throw std::invalid_argument("check_existence_hypotheses: growth certificate required");
    const GrowthCertificate& cert = *h.growth;
    HypothesisReport rep;
    std::ostringstream detail;

    Rng rng(seed);
    std::uniform_real_distribution<double> ut(0.0, period);

    // (H1)  H(t, u) >= <xi(t), u>.
    rep.h1 = true;
    auto pts = sample_points(rng, h.dim(), 200);
    for (const auto& u : pts) {
        const double t = ut(rng);
        const Vec xi = cert.xi_at(t, h.dim());
        const double lhs = h.value(t, u);
        const double rhs = dot(xi, u);
        if (lhs < rhs - 1e-9 * (1.0 + std::abs(rhs))) {
            rep.h1 = false;
            detail << "(H1) fails at t=" << t << ", |u|=" << norm2(u) << ": H=" << lhs
                   << " < <xi,u>=" << rhs << "\n";
            break;
        }
    }
    if (rep.h1) detail << "(H1) holds on 200 samples\n";

    // (H2)  Lambda^{-1} > T max{1, C_{G*}(T)/2}.
    rep.lambda_inv = 1.0 / cert.big_lambda;
    rep.h2_threshold = period * std::max(1.0, cg_star / 2.0);
    rep.h2 = rep.lambda_inv > rep.h2_threshold;
    detail << "(H2) Lambda^{-1}=" << rep.lambda_inv << (rep.h2 ? " > " : " <= ")
           << rep.h2_threshold << "\n";

    // Sharper growth-index bound: K^{-1} min{(T Lambda)^{-beta-eps},
    // (T Lambda)^{-alpha+eps}} >= C_{G*}(T)/2.
    const GrowthIndices idx = growth_indices(cert.g);
    const double tl = period * cert.big_lambda;
    rep.sharp_lhs = (1.0 / idx.k_eps) *
                    std::min(std::pow(tl, -idx.mo_beta), std::pow(tl, -idx.mo_alpha));
    rep.sharp_rhs = cg_star / 2.0;
    rep.h2_sharp = rep.sharp_lhs >= rep.sharp_rhs;
    detail << "(H2') index bound " << rep.sharp_lhs << (rep.h2_sharp ? " >= " : " < ")
           << rep.sharp_rhs << " (alpha=" << idx.mo_alpha << ", beta=" << idx.mo_beta
           << ", K=" << idx.k_eps << ")\n";

    // (H3)  int_0^T H(t, u) dt increases along rays at radii 10, 100, 1000.
    rep.h3 = true;
    const int time_samples = 16;
    for (int i = 0; i < 64 && rep.h3; ++i) {
        const Vec dir = random_direction(rng, h.dim());
        double prev = -std::numeric_limits<double>::infinity();
        for (double r : {10.0, 100.0, 1000.0}) {
            Vec x = dir;
            scale(r, x);
            double integral = 0.0;
            for (int m = 0; m < time_samples; ++m)
                integral += h.value(period * m / time_samples, x);
            integral *= period / time_samples;
            if (integral <= prev) {
                rep.h3 = false;
                detail << "(H3) fails along direction with |u|=" << r << "\n";
                break;
            }
            prev = integral;
        }
    }
    if (rep.h3) detail << "(H3) monotone growth along 64 sampled rays\n";

    rep.detail = detail.str();
    return rep;
}

OrbitResult solve_with_continuation(DualActionProblem p, const ContinuationOptions& opts) {
    double eps = opts.epsilon0;
    if (eps < 0.0) {
        if (!p.h.growth)
            throw std::invalid_argument("continuation: default epsilon needs a certificate");
        eps = 1e-3 * p.h.growth->big_lambda;
    }

    std::optional<Trajectory> warm;
    std::optional<OrbitResult> prev;
    OrbitResult result;
    for (int stage = 0; stage < opts.max_stages; ++stage) {
        p.epsilon = eps;
        result = minimize_dual_action(p, warm);
        if (prev) {
            double movement = 0.0;
            for (size_t i = 0; i < result.u.values().size(); ++i)
                movement = std::max(movement,
                                    std::abs(result.u.values()[i] - prev->u.values()[i]));
            if (movement < opts.movement_tol) break;
        }
        warm = result.v;
        prev = result;
        eps *= opts.shrink;
        if (eps < 1e-14) break;
    }
    return result;
}

}  // namespace dualact
