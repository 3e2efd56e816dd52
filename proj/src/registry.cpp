#include "dualact/registry.hpp"

#include <cmath>
#include <numbers>

#include "dualact/cg_constant.hpp"

namespace dualact {

using nlohmann::json;

namespace {

double param(const json& p, const char* key, double fallback) {
    return p.contains(key) ? p.at(key).get<double>() : fallback;
}

int param_int(const json& p, const char* key, int fallback) {
    return p.contains(key) ? p.at(key).get<int>() : fallback;
}

Hamiltonian quadratic_forced(double amplitude, double period) {
    const double omega = 2.0 * std::numbers::pi / period;
    auto forcing = [amplitude, omega](double t) {
        return Vec{amplitude * std::cos(omega * t), amplitude * std::sin(omega * t)};
    };
    Hamiltonian h(
        2,
        [forcing](double t, ConstSpan u) {
            const Vec e = forcing(t);
            return 0.5 * dot(u, u) + dot(e, u);
        },
        [forcing](double t, ConstSpan u) {
            Vec g = forcing(t);
            for (size_t j = 0; j < u.size(); ++j) g[j] += u[j];
            return g;
        });
    h.set_closed_conjugate([forcing](double t, ConstSpan v) {
        const Vec e = forcing(t);
        Vec arg(v.size());
        double val = 0.0;
        for (size_t j = 0; j < v.size(); ++j) {
            arg[j] = v[j] - e[j];
            val += 0.5 * arg[j] * arg[j];
        }
        return std::make_pair(val, std::move(arg));
    });

    GrowthCertificate cert;
    cert.g = GFunction::power(2.0, 0.5, 2);
    cert.lambda = 0.5;
    cert.big_lambda = 1.1;
    const double a2 = amplitude * amplitude;
    cert.beta = [a2](double) { return 0.67 * a2 + 1e-6; };
    cert.gamma = [a2](double) { return 2.5 * a2 + 1e-6; };
    cert.xi = forcing;
    h.growth = std::move(cert);
    return h;
}

Hamiltonian power_sum_iso(double p, double lambda, int n) {
    const GFunction g = GFunction::symplectic_power_pair(p, n);
    const GFunction star = g.conjugate();
    Hamiltonian h(
        2 * n,
        [g, lambda](double, ConstSpan u) {
            Vec lu(u.begin(), u.end());
            scale(lambda, lu);
            return g.value(lu);
        },
        [g, lambda](double, ConstSpan u) {
            Vec lu(u.begin(), u.end());
            scale(lambda, lu);
            Vec grad = g.gradient(lu);
            scale(lambda, grad);
            return grad;
        });
    h.set_closed_conjugate([star, lambda](double, ConstSpan v) {
        Vec w(v.begin(), v.end());
        scale(1.0 / lambda, w);
        const double val = star.value(w);
        Vec arg = star.gradient(w);
        scale(1.0 / lambda, arg);
        return std::make_pair(val, std::move(arg));
    });
    GrowthCertificate cert;
    cert.g = g;
    cert.lambda = lambda;
    cert.big_lambda = lambda;
    h.growth = std::move(cert);
    return h;
}

Hamiltonian linear_hamiltonian(Vec c) {
    const int dim = static_cast<int>(c.size());
    Hamiltonian h(
        dim, [c](double, ConstSpan u) { return dot(c, u); },
        [c](double, ConstSpan) { return c; });
    GrowthCertificate cert;
    cert.g = GFunction::power(2.0, 0.5, dim);
    cert.lambda = 0.0;
    cert.big_lambda = 1.0;
    const double c2 = dot(c, c);
    cert.gamma = [c2](double) { return 0.5 * c2 + 1e-9; };
    cert.xi = [c](double) { return c; };
    h.growth = std::move(cert);
    return h;
}

}  // namespace

Hamiltonian make_registry_hamiltonian(const std::string& id, const json& params, double period) {
    if (id == "quadratic_forced") return quadratic_forced(param(params, "amplitude", 1.0), period);
    if (id == "power_sum_iso")
        return power_sum_iso(param(params, "p", 3.0), param(params, "Lambda", 0.3),
                             param_int(params, "n", 1));
    if (id == "tian_ge") {
        const double p = param(params, "p", 3.0);
        const double a = param(params, "a", 0.2);
        return power_sum_iso(p, std::pow(a, 1.0 / p), param_int(params, "n", 1));
    }
    if (id == "linear") {
        Vec c = params.contains("c") ? params.at("c").get<Vec>() : Vec{1.0, 1.0};
        return linear_hamiltonian(std::move(c));
    }
    throw std::invalid_argument("unknown hamiltonian id '" + id + "'");
}

GFunction make_registry_gfunction(const json& spec) {
    if (spec.is_object() && spec.contains("id")) {
        const std::string id = spec.at("id").get<std::string>();
        const json params = spec.contains("params") ? spec.at("params") : json::object();
        if (id == "power_pair")
            return GFunction::symplectic_power_pair(param(params, "p", 2.0),
                                                    param_int(params, "n", 1));
        if (id == "quadratic") {
            const int n = param_int(params, "n", 2);
            return GFunction::power(2.0, 0.5 * param(params, "scale", 1.0), n);
        }
        throw std::invalid_argument("unknown gfunction id '" + id + "'");
    }
    return GFunction::from_json(spec);
}

std::optional<double> registry_cg_star(const std::string& id, const json& params, double period) {
    if (id == "quadratic_forced" || id == "linear")
        return 1.0 / (std::numbers::pi * period);
    if (id == "power_sum_iso" || id == "tian_ge")
        return cg_closed_form(param(params, "p", 3.0)) / period;
    return std::nullopt;
}

ParsedProblem problem_from_json(const json& spec) {
    ParsedProblem out;
    const json& hj = spec.at("hamiltonian");
    out.hamiltonian_id = hj.at("id").get<std::string>();
    const json params = hj.contains("params") ? hj.at("params") : json::object();

    out.problem.period = param(spec, "T", 1.0);
    out.problem.h = make_registry_hamiltonian(out.hamiltonian_id, params, out.problem.period);
    out.problem.n_samples = param_int(spec, "N", 128);
    out.problem.epsilon = param(spec, "epsilon", -1.0);  // unset: callers run continuation
    if (spec.contains("solver")) {
        const json& s = spec.at("solver");
        out.problem.solver.grad_tol = param(s, "grad_tol", out.problem.solver.grad_tol);
        out.problem.solver.max_iter = param_int(s, "max_iter", out.problem.solver.max_iter);
    }
    if (spec.contains("cg_star"))
        out.problem.cg_star = spec.at("cg_star").get<double>();
    else if (auto cg = registry_cg_star(out.hamiltonian_id, params, out.problem.period))
        out.problem.cg_star = *cg;
    if (spec.contains("waive_hypothesis_check"))
        out.problem.waive_hypothesis_check = spec.at("waive_hypothesis_check").get<bool>();
    return out;
}

PhiLaplacianProblem phi_problem_from_json(const json& spec) {
    PhiLaplacianProblem p;
    p.period = param(spec, "T", 1.0);

    const json& phij = spec.at("phi");
    if (phij.is_object() && phij.contains("id")) {
        const std::string id = phij.at("id").get<std::string>();
        const json params = phij.contains("params") ? phij.at("params") : json::object();
        if (id == "power")
            p.phi = GFunction::power(param(params, "p", 2.0), 1.0 / param(params, "p", 2.0),
                                     param_int(params, "n", 1));
        else
            throw std::invalid_argument("unknown phi id '" + id + "'");
    } else {
        p.phi = GFunction::from_json(phij);
    }

    const json& vj = spec.at("potential");
    const std::string vid = vj.at("id").get<std::string>();
    const json vp = vj.contains("params") ? vj.at("params") : json::object();
    const int n = p.phi.dim();
    const double period = p.period;
    if (vid == "quadratic_cos") {
        const double k = param(vp, "k", 0.5);
        const double amp = param(vp, "amplitude", 1.0);
        const double omega = 2.0 * std::numbers::pi / period;
        p.potential = [k, amp, omega](double t, ConstSpan q) {
            return 0.5 * k * dot(q, q) + amp * std::cos(omega * t) * q[0];
        };
        p.potential_gradient = [k, amp, omega](double t, ConstSpan q) {
            Vec g(q.size());
            for (size_t j = 0; j < q.size(); ++j) g[j] = k * q[j];
            g[0] += amp * std::cos(omega * t);
            return g;
        };
        const double a2 = amp * amp;
        p.gamma = [a2, k](double) { return 2.0 * a2 / k + 1.0; };
        // V(t, q) >= <amp cos(omega t) e1, q> since the quadratic part is >= 0
        p.l = [n, amp, omega](double t) {
            Vec lt(n, 0.0);
            lt[0] = amp * std::cos(omega * t);
            return lt;
        };
    } else if (vid == "scaled_power") {
        const double pw = param(vp, "p", 3.0);
        const double c = param(vp, "c", 0.5);
        p.potential = [pw, c](double, ConstSpan q) {
            return c * std::pow(norm2(q), pw) / pw;
        };
        p.potential_gradient = [pw, c](double, ConstSpan q) {
            const double r = norm2(q);
            Vec g(q.size(), 0.0);
            if (r > 0.0) {
                const double f = c * std::pow(r, pw - 2.0);
                for (size_t j = 0; j < q.size(); ++j) g[j] = f * q[j];
            }
            return g;
        };
        p.gamma = [](double) { return 0.0; };
        p.l = [n](double) { return Vec(n, 0.0); };
    } else {
        throw std::invalid_argument("unknown potential id '" + vid + "'");
    }

    if (spec.contains("Lambda")) p.lambda = spec.at("Lambda").get<double>();
    if (spec.contains("cg")) p.cg_value = spec.at("cg").get<double>();
    return p;
}

}  // namespace dualact
