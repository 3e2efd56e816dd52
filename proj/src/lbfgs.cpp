#include "dualact/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace dualact {

LbfgsResult lbfgs_minimize(const std::function<double(ConstSpan, Vec&)>& fg, Vec x0,
                           const LbfgsOptions& opts, const std::function<bool(Vec&)>& post_step) {
    const size_t n = x0.size();
    LbfgsResult res;
    res.x = std::move(x0);

    Vec grad(n);
    double f = fg(res.x, grad);

    struct Pair {
        Vec s, y;
        double rho;
    };
    std::deque<Pair> mem;

    Vec dir(n), xnew(n), gnew(n);
    double prev_f = f;
    double best_f = f;
    int no_progress = 0;

    for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
        res.grad_max = max_abs(grad);
        if (res.grad_max <= opts.grad_tol) {
            res.converged = true;
            break;
        }

        // Two-loop recursion.
        dir = grad;
        std::vector<double> alpha(mem.size());
        for (size_t i = mem.size(); i-- > 0;) {
            alpha[i] = mem[i].rho * dot(mem[i].s, dir);
            axpy(-alpha[i], mem[i].y, dir);
        }
        if (opts.apply_h0) {
            opts.apply_h0(dir);
            if (!mem.empty()) {
                const auto& last = mem.back();
                Vec py = last.y;
                opts.apply_h0(py);
                const double gamma = dot(last.s, last.y) / dot(last.y, py);
                scale(gamma, dir);
            }
        } else if (!mem.empty()) {
            const auto& last = mem.back();
            const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
            scale(gamma, dir);
        }
        for (size_t i = 0; i < mem.size(); ++i) {
            const double beta = mem[i].rho * dot(mem[i].y, dir);
            axpy(alpha[i] - beta, mem[i].s, dir);
        }
        scale(-1.0, dir);

        double slope = dot(grad, dir);
        if (slope >= 0.0) {  // not a descent direction; fall back to steepest
            dir = grad;
            scale(-1.0, dir);
            slope = -dot(grad, grad);
            mem.clear();
        }

        double t = 1.0;
        double fn = f;
        bool accepted = false;
        for (int ls = 0; ls < opts.max_line_search; ++ls, t *= opts.backtrack) {
            xnew = res.x;
            axpy(t, dir, xnew);
            fn = fg(xnew, gnew);
            const double noise = 4.0 * opts.noise_eps * (std::abs(f) + std::abs(fn) + 1.0);
            if (std::isfinite(fn) && fn <= f + opts.armijo_c * t * slope + noise) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            res.line_search_failed = true;
            break;
        }

        Pair pr;
        pr.s.resize(n);
        pr.y.resize(n);
        for (size_t i = 0; i < n; ++i) {
            pr.s[i] = xnew[i] - res.x[i];
            pr.y[i] = gnew[i] - grad[i];
        }
        const double sy = dot(pr.s, pr.y);
        if (sy > 1e-12 * norm2(pr.s) * norm2(pr.y)) {
            pr.rho = 1.0 / sy;
            mem.push_back(std::move(pr));
            if (static_cast<int>(mem.size()) > opts.memory) mem.pop_front();
        }

        res.x.swap(xnew);
        grad.swap(gnew);
        f = fn;
        if (post_step) {
            if (!post_step(res.x)) mem.clear();
            f = fg(res.x, grad);
        }

        if (f < best_f - 4.0 * opts.noise_eps * (std::abs(best_f) + 1.0)) {
            best_f = f;
            no_progress = 0;
        } else if (++no_progress >= opts.stall_patience) {
            res.stagnated = true;
            break;
        }

        if (opts.rel_change_tol > 0.0 &&
            std::abs(prev_f - f) <= opts.rel_change_tol * (1.0 + std::abs(f)) &&
            res.iterations > 20) {
            res.converged = true;
            break;
        }
        prev_f = f;
    }
    res.value = f;
    res.grad_max = max_abs(grad);
    if (res.grad_max <= opts.grad_tol) res.converged = true;
    return res;
}

}  // namespace dualact
