#include "dualact/cg_constant.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "dualact/dual_action.hpp"
#include "dualact/lbfgs.hpp"

namespace dualact {

namespace {

void project_mean(Vec& values, int n, int dim) {
    for (int j = 0; j < dim; ++j) {
        double m = 0.0;
        for (int k = 0; k < n; ++k) m += values[static_cast<size_t>(k) * dim + j];
        m /= n;
        for (int k = 0; k < n; ++k) values[static_cast<size_t>(k) * dim + j] -= m;
    }
}

/// f(x) = w sum <J x'_k, x_k>  and its coefficient gradient.
struct SkewForm {
    double period;
    int n, dim;
    double w;

    double value(ConstSpan x, Vec& dx) const {
        dx = periodic_derivative(x, n, dim, period, DerivRule::Spectral);
        double s = 0.0;
        Vec jk(dim);
        for (int k = 0; k < n; ++k) {
            apply_J(ConstSpan(dx.data() + static_cast<size_t>(k) * dim, dim), jk);
            s += dot(jk, ConstSpan(x.data() + static_cast<size_t>(k) * dim, dim));
        }
        return w * s;
    }

    Vec gradient(ConstSpan x, ConstSpan dx) const {
        Vec jdx(x.size()), jx(x.size());
        for (int k = 0; k < n; ++k) {
            apply_J(ConstSpan(dx.data() + static_cast<size_t>(k) * dim, dim),
                    MutSpan(jdx.data() + static_cast<size_t>(k) * dim, dim));
            apply_J(ConstSpan(x.data() + static_cast<size_t>(k) * dim, dim),
                    MutSpan(jx.data() + static_cast<size_t>(k) * dim, dim));
        }
        const Vec dtjx = periodic_derivative_transpose(jx, n, dim, period, DerivRule::Spectral);
        Vec grad(x.size());
        for (size_t i = 0; i < grad.size(); ++i) grad[i] = w * (jdx[i] - dtjx[i]);
        return grad;
    }
};

/// g(x) = w sum G(scale * x'_k) and its coefficient gradient.
struct ModularForm {
    const GFunction* g;
    double period;
    int n, dim;
    double w;
    double scale_factor;   // T for the C_G ratio, 1 for problem (P)

    double value(ConstSpan dx) const {
        double s = 0.0;
        Vec sx(dim);
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < dim; ++j)
                sx[j] = scale_factor * dx[static_cast<size_t>(k) * dim + j];
            s += g->value(sx);
        }
        return w * s;
    }

    Vec gradient(ConstSpan dx) const {
        Vec field(static_cast<size_t>(n) * dim);
        Vec sx(dim);
        for (int k = 0; k < n; ++k) {
            for (int j = 0; j < dim; ++j)
                sx[j] = scale_factor * dx[static_cast<size_t>(k) * dim + j];
            const Vec gg = g->gradient(sx);
            for (int j = 0; j < dim; ++j)
                field[static_cast<size_t>(k) * dim + j] = scale_factor * gg[j];
        }
        Vec grad = periodic_derivative_transpose(field, n, dim, period, DerivRule::Spectral);
        scale(w, grad);
        return grad;
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Ratio minimization.
// ---------------------------------------------------------------------------

CgEstimate estimate_cg_ratio(const GFunction& g, double period, int n_samples, int restarts,
                             uint64_t seed) {
    CgOptions opts;
    opts.restarts = restarts;
    opts.seed = seed;
    return estimate_cg_ratio(g, period, n_samples, opts);
}

CgEstimate estimate_cg_ratio(const GFunction& g, double period, int n_samples,
                             const CgOptions& opts) {
    if (g.dim() % 2 != 0)
        throw std::invalid_argument("estimate_cg_ratio: dimension must be even");
    if (opts.require_symplectic) {
        const SymplecticReport rep = symplectic_test(g, 100, 1e-6);
        if (!rep.symplectic)
            throw std::invalid_argument(
                "estimate_cg_ratio: G failed the symplectic residual test (worst " +
                std::to_string(rep.worst_residual) + ")");
    }

    const int n = n_samples;
    const int d = g.dim();
    const double w = period / n;
    const SkewForm skew{period, n, d, w};
    const ModularForm mod{&g, period, n, d, w, period};
    const double floor_ratio = -4.0 / period;  // symplectic bound is -2/T

    auto ratio_fg = [&](ConstSpan x, Vec& grad) {
        Vec dx;
        const double f = skew.value(x, dx);
        const double gm = mod.value(dx);
        if (!(gm > 1e-300)) {
            grad.assign(x.size(), 0.0);
            return std::numeric_limits<double>::infinity();
        }
        const double r = f / gm;
        if (r < floor_ratio)
            throw std::runtime_error(
                "estimate_cg_ratio: ratio unbounded below; input does not look symplectic");
        const Vec gf = skew.gradient(x, dx);
        const Vec gg = mod.gradient(dx);
        grad.resize(x.size());
        for (size_t i = 0; i < grad.size(); ++i) grad[i] = (gf[i] - r * gg[i]) / gm;
        project_mean(grad, n, d);
        return r;
    };

    // Rescale so that int G(T u') = 1; the modular is strictly increasing in
    // the scaling, so a bracketed bisection always lands.
    auto normalize = [&](Vec& x) {
        const Vec dx = periodic_derivative(x, n, d, period, DerivRule::Spectral);
        auto mod_scaled = [&](double s) {
            Vec sdx = dx;
            scale(s, sdx);
            return mod.value(sdx);
        };
        if (!(mod_scaled(1.0) > 0.0)) return;
        double lo = 1.0, hi = 1.0;
        if (mod_scaled(1.0) < 1.0) {
            while (mod_scaled(hi) < 1.0 && hi < 1e12) hi *= 2.0;
        } else {
            while (mod_scaled(lo) > 1.0 && lo > 1e-12) lo *= 0.5;
        }
        double s = 1.0;
        for (int it = 0; it < 100; ++it) {
            s = 0.5 * (lo + hi);
            const double m = mod_scaled(s);
            if (std::abs(m - 1.0) < 1e-13) break;
            (m < 1.0 ? lo : hi) = s;
        }
        scale(s, x);
    };

    CgEstimate est;
    est.period = period;
    est.method = "ratio-minimization";

    auto run_restart = [&](int r) {
        Rng rng(opts.seed + 1000ULL * r);
        Trajectory x0 = random_band_limited(rng, period, n, d, 3);
        Vec x = x0.values();
        project_mean(x, n, d);
        normalize(x);

        LbfgsOptions lopts;
        lopts.max_iter = opts.max_iter;
        lopts.grad_tol = opts.grad_tol;
        lopts.rel_change_tol = 1e-13;
        auto guard = [&](Vec& xv) {
            project_mean(xv, n, d);
            Vec dx = periodic_derivative(xv, n, d, period, DerivRule::Spectral);
            const double gm = mod.value(dx);
            if (gm < 1e-4 || gm > 1e4) {
                normalize(xv);
                return false;
            }
            return true;
        };
        return lbfgs_minimize(ratio_fg, std::move(x), lopts, guard);
    };

    // Restarts are independent; the reduction below is seed-ordered, so the
    // result does not depend on the pool width.
    std::vector<LbfgsResult> runs(opts.restarts);
    std::vector<std::exception_ptr> failures(opts.restarts);
    const int threads = std::min(configured_threads(), opts.restarts);
    if (threads <= 1) {
        for (int r = 0; r < opts.restarts; ++r) runs[r] = run_restart(r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (int r = next.fetch_add(1); r < opts.restarts; r = next.fetch_add(1)) {
                    try {
                        runs[r] = run_restart(r);
                    } catch (...) {
                        failures[r] = std::current_exception();
                    }
                }
            });
        for (auto& th : pool) th.join();
        for (auto& f : failures)
            if (f) std::rethrow_exception(f);
    }

    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < opts.restarts; ++r) {
        const LbfgsResult& lr = runs[r];
        Vec dx = periodic_derivative(lr.x, n, d, period, DerivRule::Spectral);
        est.gamma_record.emplace_back(mod.value(dx), lr.value);
        if (lr.value < best) {
            best = lr.value;
            est.certificate_orbit = Trajectory(period, n, d);
            est.certificate_orbit.values() = lr.x;
        }
    }
    est.value = -best;

    if (opts.cross_check_scaling) {
        CgOptions sub = opts;
        sub.cross_check_scaling = false;
        sub.restarts = std::max(2, opts.restarts / 2);
        sub.require_symplectic = false;
        const CgEstimate doubled = estimate_cg_ratio(g, 2.0 * period, n_samples, sub);
        est.scaling_check = 2.0 * doubled.value;
    }
    return est;
}

// ---------------------------------------------------------------------------
// Constrained problem (P).
// ---------------------------------------------------------------------------

ConstrainedSolution solve_constrained_p(const GFunction& g, double gamma, double period,
                                        int n_samples, int restarts, uint64_t seed) {
    if (gamma <= 0.0) throw std::invalid_argument("solve_constrained_p: gamma must be positive");
    const int n = n_samples;
    const int d = g.dim();
    const double w = period / n;
    const SkewForm skew{period, n, d, w};
    const ModularForm mod{&g, period, n, d, w, 1.0};

    ConstrainedSolution best;
    best.a_gamma = std::numeric_limits<double>::infinity();

    for (int rs = 0; rs < restarts; ++rs) {
        Rng rng(seed + 317ULL * rs);
        Trajectory x0t = random_band_limited(rng, period, n, d, 3);
        Vec x = x0t.values();
        project_mean(x, n, d);
        {
            // start feasible: scale so the constraint holds
            Vec dx = periodic_derivative(x, n, d, period, DerivRule::Spectral);
            double gm = mod.value(dx);
            double s = 1.0;
            for (int it = 0; it < 200 && std::abs(gm - gamma) > 1e-12 * gamma; ++it) {
                s *= std::pow(gamma / gm, 0.35);
                Vec sx = x;
                scale(s, sx);
                dx = periodic_derivative(sx, n, d, period, DerivRule::Spectral);
                gm = mod.value(dx);
                if (std::abs(gm - gamma) < 1e-12 * gamma) {
                    x = std::move(sx);
                    break;
                }
            }
            if (std::abs(gm - gamma) > 1e-6 * gamma) scale(s, x);
        }

        double mu = 0.0;
        double rho = 100.0 / (gamma * gamma);
        double prev_c = std::numeric_limits<double>::infinity();
        Vec xcur = x;
        for (int outer = 0; outer < 25; ++outer) {
            auto fg = [&](ConstSpan xv, Vec& grad) {
                Vec dx;
                const double f = skew.value(xv, dx);
                const double c = mod.value(dx) - gamma;
                const Vec gf = skew.gradient(xv, dx);
                const Vec gg = mod.gradient(dx);
                grad.resize(xv.size());
                const double lagr = mu + rho * c;
                for (size_t i = 0; i < grad.size(); ++i) grad[i] = gf[i] + lagr * gg[i];
                project_mean(grad, n, d);
                return f + mu * c + 0.5 * rho * c * c;
            };
            LbfgsOptions lopts;
            lopts.max_iter = 1500;
            lopts.grad_tol = 1e-10 * std::max(1.0, gamma);
            lopts.rel_change_tol = 1e-13;
            auto guard = [&](Vec& xv) {
                project_mean(xv, n, d);
                return true;
            };
            LbfgsResult lr = lbfgs_minimize(fg, std::move(xcur), lopts, guard);
            xcur = std::move(lr.x);

            Vec dx = periodic_derivative(xcur, n, d, period, DerivRule::Spectral);
            const double c = mod.value(dx) - gamma;
            mu += rho * c;
            if (std::abs(c) < 1e-10 * gamma) break;
            if (std::abs(c) > 0.25 * std::abs(prev_c)) rho *= 4.0;
            prev_c = c;
        }

        Vec dx;
        const double f = skew.value(xcur, dx);
        const double c = mod.value(dx) - gamma;
        if (std::abs(c) > 1e-6 * gamma) continue;
        if (f < best.a_gamma) {
            best.a_gamma = f;
            best.u = Trajectory(period, n, d);
            best.u.values() = xcur;
            best.constraint_residual = std::abs(c);
        }
    }

    if (!std::isfinite(best.a_gamma))
        throw std::runtime_error("solve_constrained_p: constraint infeasible at tolerance");

    // Multiplier from  grad f = 2 lambda grad g  at the solution.
    Vec dx;
    skew.value(best.u.values(), dx);
    const Vec gf = skew.gradient(best.u.values(), dx);
    Vec gg = mod.gradient(dx);
    project_mean(gg, n, d);
    Vec gfp = gf;
    project_mean(gfp, n, d);
    best.lambda = dot(gfp, gg) / (2.0 * dot(gg, gg));
    if (best.lambda >= 0.0)
        throw std::runtime_error(
            "solve_constrained_p: nonnegative multiplier (spurious stationary point)");

    // Residual of  J u' + lambda d/dt grad G(u') = 0 node-wise.
    Vec field(static_cast<size_t>(n) * d);
    for (int k = 0; k < n; ++k) {
        const Vec gg2 = g.gradient(ConstSpan(dx.data() + static_cast<size_t>(k) * d, d));
        std::copy(gg2.begin(), gg2.end(), field.begin() + static_cast<size_t>(k) * d);
    }
    const Vec dfield = periodic_derivative(field, n, d, period, DerivRule::Spectral);
    double resid = 0.0;
    Vec jk(d);
    for (int k = 0; k < n; ++k) {
        apply_J(ConstSpan(dx.data() + static_cast<size_t>(k) * d, d), jk);
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            const double rkj = jk[j] + best.lambda * dfield[static_cast<size_t>(k) * d + j];
            s += rkj * rkj;
        }
        resid = std::max(resid, std::sqrt(s));
    }
    best.stationarity_residual = resid;
    return best;
}

// ---------------------------------------------------------------------------
// Autonomous flow u' = J grad G(u) and first-return period detection.
// ---------------------------------------------------------------------------

namespace {

Vec flow_velocity(const GFunction& g, ConstSpan u) { return apply_J(g.gradient(u)); }

/// One implicit-midpoint step; splits the step on Newton failure.
Vec midpoint_step(const GFunction& g, const Vec& u, double h, int depth = 0) {
    const int d = static_cast<int>(u.size());
    Vec w = u;
    axpy(h, flow_velocity(g, u), w);  // explicit predictor

    Vec mid(d), fvec(d);
    auto residual = [&](const Vec& wv) {
        for (int j = 0; j < d; ++j) mid[j] = 0.5 * (u[j] + wv[j]);
        const Vec vel = flow_velocity(g, mid);
        double s = 0.0;
        for (int j = 0; j < d; ++j) {
            fvec[j] = wv[j] - u[j] - h * vel[j];
            s += fvec[j] * fvec[j];
        }
        return std::sqrt(s);
    };

    // Solve to near machine precision: the per-step solve bias accumulates
    // coherently into the conserved quantity over ~1e5 steps.
    const double tol = 1e-15 * (1.0 + norm2(u));
    const double accept_tol = 1e-12 * (1.0 + norm2(u));
    double res = residual(w);
    for (int it = 0; it < 40 && res > tol; ++it) {
        Matrix jac = Matrix::identity(d);
        Vec wp = w;
        for (int j = 0; j < d; ++j) {
            const double hh = 1.5e-8 * (1.0 + std::abs(w[j]));
            const double saved = wp[j];
            wp[j] = saved + hh;
            for (int i = 0; i < d; ++i) mid[i] = 0.5 * (u[i] + wp[i]);
            const Vec vp = flow_velocity(g, mid);
            wp[j] = saved - hh;
            for (int i = 0; i < d; ++i) mid[i] = 0.5 * (u[i] + wp[i]);
            const Vec vm = flow_velocity(g, mid);
            wp[j] = saved;
            for (int i = 0; i < d; ++i)
                jac(i, j) = (i == j ? 1.0 : 0.0) - h * (vp[i] - vm[i]) / (2.0 * hh);
        }
        Vec rhs(d);
        residual(w);
        for (int j = 0; j < d; ++j) rhs[j] = -fvec[j];
        Vec step;
        try {
            step = solve_linear(jac, rhs);
        } catch (const std::runtime_error&) {
            break;
        }
        double t = 1.0;
        bool ok = false;
        for (int ls = 0; ls < 25; ++ls, t *= 0.5) {
            Vec cand = w;
            axpy(t, step, cand);
            const double rc = residual(cand);
            if (rc < res) {
                w = std::move(cand);
                res = rc;
                ok = true;
                break;
            }
        }
        if (!ok) break;  // stalled at the rounding floor
    }
    if (res > accept_tol) {
        if (depth >= 12)
            throw std::runtime_error("flow integration: midpoint solve failed at minimum step");
        const Vec half = midpoint_step(g, u, 0.5 * h, depth + 1);
        return midpoint_step(g, half, 0.5 * h, depth + 1);
    }
    return w;
}

}  // namespace

FlowResult flow_characterization(const GFunction& g, const Vec& u0, const FlowOptions& opts) {
    require_dim(g.dim(), u0.size(), "flow_characterization");
    if (norm2(u0) == 0.0)
        throw std::invalid_argument("flow_characterization: u0 must be nonzero");
    if (g.dim() % 2 != 0)
        throw std::invalid_argument("flow_characterization: dimension must be even");

    const double h = opts.step > 0.0 ? opts.step : opts.reference_period / 1048576.0;
    const double max_time = opts.max_time > 0.0 ? opts.max_time : 8.0 * opts.reference_period;
    const int d = g.dim();

    Vec f0 = flow_velocity(g, u0);
    const double speed0 = norm2(f0);
    if (speed0 < 1e-14)
        throw std::invalid_argument("flow_characterization: u0 is an equilibrium");
    scale(1.0 / speed0, f0);

    const GFunction star = g.conjugate();
    const bool closed_star = g.conjugate_is_closed_form();
    auto star_of_grad = [&](ConstSpan u, const Vec& grad_u) {
        // Young's identity when no closed conjugate is available.
        return closed_star ? star.value(grad_u) : dot(grad_u, u) - g.value(u);
    };

    const double g0 = g.value(u0);
    auto section = [&](const Vec& u) {
        Vec diff = u;
        axpy(-1.0, u0, diff);
        return dot(diff, f0);
    };

    std::vector<Vec> path;
    path.push_back(u0);
    Vec grad0v = g.gradient(u0);
    double num_prev = dot(grad0v, u0);
    double den_prev = star_of_grad(u0, grad0v);
    double num_int = 0.0, den_int = 0.0;
    double drift = 0.0, diameter = 0.0;

    Vec u = u0;
    double psi_prev = 0.0;
    double t = 0.0;
    long steps = 0;

    FlowResult out;
    bool detected = false;

    while (t < max_time) {
        Vec next = midpoint_step(g, u, h);
        t += h;
        ++steps;

        const Vec gr = g.gradient(next);
        const double num_cur = dot(gr, next);
        const double den_cur = star_of_grad(next, gr);
        num_int += 0.5 * h * (num_prev + num_cur);
        den_int += 0.5 * h * (den_prev + den_cur);

        drift = std::max(drift, std::abs(g.value(next) - g0));
        if (drift > opts.energy_tol * (1.0 + std::abs(g0)))
            throw std::runtime_error("flow_characterization: energy drift " +
                                     std::to_string(drift) + " beyond tolerance");
        Vec diff = next;
        axpy(-1.0, u0, diff);
        diameter = std::max(diameter, norm2(diff));

        const double psi = section(next);
        const bool near = norm2(diff) < 0.35 * diameter && steps > 8;
        if (near && psi_prev < 0.0 && psi >= 0.0) {
            // Refine the crossing inside [t-h, t] by secant on the section value.
            double frac = psi_prev / (psi_prev - psi);
            Vec cross = u;
            double used = frac * h;
            for (int it = 0; it < 4; ++it) {
                cross = midpoint_step(g, u, used);
                const double pc = section(cross);
                const Vec vel = flow_velocity(g, cross);
                const double dpsi = dot(vel, f0);
                if (std::abs(dpsi) < 1e-300) break;
                const double delta = -pc / dpsi;
                used = std::clamp(used + delta, 0.0, h);
                if (std::abs(delta) < 1e-15 * std::max(1.0, h)) break;
            }
            cross = midpoint_step(g, u, used);
            Vec err = cross;
            axpy(-1.0, u0, err);
            if (norm2(err) <= opts.return_tol * (1.0 + norm2(u0))) {
                const double period = t - h + used;
                // Trim the trapezoid tail to the fractional step.
                const Vec grc = g.gradient(cross);
                const double numc = dot(grc, cross);
                const double denc = star_of_grad(cross, grc);
                num_int -= 0.5 * h * (num_prev + num_cur);
                den_int -= 0.5 * h * (den_prev + den_cur);
                num_int += 0.5 * used * (num_prev + numc);
                den_int += 0.5 * used * (den_prev + denc);

                out.orbit.period = period;
                out.orbit.energy = g0;
                out.orbit.energy_drift = drift;
                out.ratio = (num_int / den_int) / period;
                detected = true;
            }
        }
        if (detected) break;

        path.push_back(next);
        u = std::move(next);
        psi_prev = psi;
        num_prev = num_cur;
        den_prev = den_cur;
    }

    if (!detected)
        throw PeriodNotDetected(
            "flow_characterization: no return to the section within max_time "
            "(orbit may be quasi-periodic)");

    // Resample one period onto a uniform grid by linear interpolation.
    const int m = opts.resample;
    out.orbit.u = Trajectory(out.orbit.period, m, d);
    for (int k = 0; k < m; ++k) {
        const double tk = out.orbit.period * k / m;
        const double pos = tk / h;
        const size_t i0 = std::min(path.size() - 1, static_cast<size_t>(pos));
        const size_t i1 = std::min(path.size() - 1, i0 + 1);
        const double fr = pos - static_cast<double>(i0);
        for (int j = 0; j < d; ++j)
            out.orbit.u.at(k, j) = (1.0 - fr) * path[i0][j] + fr * path[i1][j];
    }
    out.steps = steps;
    return out;
}

// ---------------------------------------------------------------------------
// Closed forms for scalar power pairs.
// ---------------------------------------------------------------------------

double period_formula(double p) {
    if (p <= 1.0) throw std::invalid_argument("period_formula: p must exceed 1");
    return 4.0 * std::numbers::pi * std::pow(p - 1.0, 1.0 / p) /
           (p * std::sin(std::numbers::pi / p));
}

double period_formula_beta(double p) {
    if (p <= 1.0) throw std::invalid_argument("period_formula_beta: p must exceed 1");
    const double q = p / (p - 1.0);
    const double log_beta = std::lgamma(1.0 + 1.0 / q) + std::lgamma(1.0 / p) -
                            std::lgamma(1.0 + 1.0 / q + 1.0 / p);
    return 4.0 * std::pow(p - 1.0, -1.0 / q) * std::exp(log_beta);
}

double cg_closed_form(double p) {
    if (p <= 1.0) throw std::invalid_argument("cg_closed_form: p must exceed 1");
    return p * std::sin(std::numbers::pi / p) /
           (2.0 * std::numbers::pi * std::pow(p - 1.0, 1.0 / p));
}

// ---------------------------------------------------------------------------
// Lower bound sweep and the index sandwich.
// ---------------------------------------------------------------------------

LowerBoundReport quadratic_form_lower_bound(const GFunction& g, int trials, double period,
                                            int n_samples, uint64_t seed,
                                            std::optional<std::pair<double, double>> constants) {
    LowerBoundReport rep;
    rep.trials = trials;
    if (constants) {
        rep.c1 = constants->first;
        rep.c2 = constants->second;
    } else if (symplectic_test(g, 100, 1e-6).symplectic) {
        rep.c1 = 2.0 / period;
        rep.c2 = 0.0;
    } else {
        const SemiSymplecticCertificate cert = semi_symplectic_certificate(g);
        if (!cert.found())
            throw std::invalid_argument(
                "quadratic_form_lower_bound: no semi-symplectic certificate found");
        rep.c1 = 2.0 * cert.k / period;
        rep.c2 = cert.k * cert.c / period;
    }

    const int d = g.dim();
    const double w = period / n_samples;
    Rng rng(seed);
    Vec jk(d), sx(d);
    for (int trial = 0; trial < trials; ++trial) {
        Trajectory u = random_band_limited(rng, period, n_samples, d);
        const Vec du = periodic_derivative(u.values(), n_samples, d, period, DerivRule::Spectral);
        double lhs = 0.0, gphase = 0.0;
        for (int k = 0; k < n_samples; ++k) {
            apply_J(ConstSpan(du.data() + static_cast<size_t>(k) * d, d), jk);
            lhs += dot(jk, u.node(k));
            for (int j = 0; j < d; ++j) sx[j] = period * du[static_cast<size_t>(k) * d + j];
            gphase += g.value(sx);
        }
        lhs *= w;
        gphase *= w;
        const double rhs = -rep.c1 * gphase - rep.c2;
        const double margin = lhs - rhs;
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (gphase > 0.0) rep.worst_ratio = std::min(rep.worst_ratio, lhs / gphase);
        if (margin < -1e-9 * (1.0 + std::abs(rhs))) {
            ++rep.violations;
            if (!rep.offending) rep.offending = u;
        }
    }
    return rep;
}

SandwichReport simonenko_sandwich(const GFunction& g, const std::vector<PeriodicOrbit>& orbits,
                                  double estimate) {
    if (orbits.empty())
        throw std::invalid_argument("simonenko_sandwich: at least one orbit required");
    const GrowthIndices idx = growth_indices(g);
    SandwichReport rep;
    rep.inf_period = std::numeric_limits<double>::infinity();
    for (const auto& o : orbits) rep.inf_period = std::min(rep.inf_period, o.period);
    rep.single_orbit = orbits.size() == 1;
    rep.lower = idx.simonenko_p / rep.inf_period;
    rep.upper = idx.simonenko_q / rep.inf_period;
    rep.estimate = estimate;
    rep.contains_estimate =
        estimate >= rep.lower - 1e-6 * (1.0 + rep.lower) &&
        estimate <= rep.upper + 1e-6 * (1.0 + rep.upper);
    return rep;
}

}  // namespace dualact
