#include "dualact/orlicz.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dualact {

double modular(const GFunction& g, const Trajectory& u) {
    require_dim(g.dim(), static_cast<size_t>(u.dim()), "modular");
    double s = 0.0;
    for (int k = 0; k < u.samples(); ++k) s += g.value(u.node(k));
    return u.quad_weight() * s;
}

double luxemburg_norm(const GFunction& g, const Trajectory& u, double tol) {
    if (u.max_norm() == 0.0) return 0.0;

    auto mod_at = [&](double lambda) {
        double s = 0.0;
        Vec w(u.dim());
        for (int k = 0; k < u.samples(); ++k) {
            ConstSpan x = u.node(k);
            for (int j = 0; j < u.dim(); ++j) w[j] = x[j] / lambda;
            s += g.value(w);
        }
        return u.quad_weight() * s;
    };

    double lo = 1.0, hi = 1.0;
    if (mod_at(1.0) <= 1.0) {
        // Shrink until the modular exceeds 1; the norm is in [lo, hi].
        for (int i = 0; i < 2000 && mod_at(lo) <= 1.0; ++i) lo *= 0.5;
        if (mod_at(lo) <= 1.0) {
            std::ostringstream os;
            os << "luxemburg_norm: bracket failure shrinking lambda (lo=" << lo
               << ", modular=" << mod_at(lo) << ")";
            throw LuxemburgError(os.str());
        }
        hi = 2.0 * lo;
        while (mod_at(hi) > 1.0) hi *= 2.0;
    } else {
        for (int i = 0; i < 2000 && mod_at(hi) > 1.0; ++i) hi *= 2.0;
        if (mod_at(hi) > 1.0) {
            std::ostringstream os;
            os << "luxemburg_norm: bracket failure growing lambda (hi=" << hi
               << ", modular=" << mod_at(hi) << ")";
            throw LuxemburgError(os.str());
        }
        lo = 0.5 * hi;
    }

    // mod_at is decreasing in lambda; stop once modular(u/lambda) is in [1-tol, 1].
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double m = mod_at(mid);
        if (m > 1.0)
            lo = mid;
        else {
            hi = mid;
            if (m >= 1.0 - tol) break;
        }
        if ((hi - lo) <= 1e-15 * hi) break;
    }
    return hi;
}

NormModularReport norm_modular_bound(const GFunction& g, const Trajectory& u) {
    NormModularReport rep{};
    rep.norm = luxemburg_norm(g, u);
    rep.modular_value = modular(g, u);
    rep.upper_slack = rep.modular_value + 1.0 - rep.norm;
    rep.lower_slack = rep.norm > 1.0 ? rep.modular_value - rep.norm
                                     : std::numeric_limits<double>::infinity();
    rep.passed = rep.upper_slack >= -1e-9 && (rep.norm <= 1.0 || rep.lower_slack >= -1e-9);
    return rep;
}

HolderReport holder_check(const GFunction& g, const Trajectory& u, const Trajectory& v) {
    require_dim(u.dim(), static_cast<size_t>(v.dim()), "holder_check");
    double s = 0.0;
    for (int k = 0; k < u.samples(); ++k) s += dot(u.node(k), v.node(k));
    HolderReport rep{};
    rep.integral = u.quad_weight() * s;
    rep.bound = 2.0 * luxemburg_norm(g, u) * luxemburg_norm(g.conjugate(), v);
    rep.ratio = rep.bound > 0.0 ? rep.integral / rep.bound : 0.0;
    rep.passed = rep.integral <= rep.bound + 1e-9 * (1.0 + std::abs(rep.bound));
    return rep;
}

PoincareWirtingerReport poincare_wirtinger_check(const GFunction& g, const Trajectory& u,
                                                 double quad_tol) {
    PoincareWirtingerReport rep{};
    rep.lhs = modular(g, u.tilde());
    Trajectory du = u.derivative();
    Vec scaled = du.values();
    scale(u.period(), scaled);
    du.values() = std::move(scaled);
    rep.rhs = modular(g, du);
    rep.passed = rep.lhs <= rep.rhs + quad_tol * (1.0 + std::abs(rep.rhs));
    return rep;
}

}  // namespace dualact
