// Independent oracles used by the tests: central finite differences,
// high-resolution quadrature, and a brute-force Fenchel sup. These stay free
// of the library's own differentiation and conjugation paths.

#pragma once

#include <cmath>
#include <functional>

#include "dualact/vecops.hpp"

namespace oracles {

using dualact::ConstSpan;
using dualact::Vec;

/// Central-difference gradient with per-component step h.
inline Vec fd_gradient(const std::function<double(ConstSpan)>& f, const Vec& u, double h) {
    Vec g(u.size());
    Vec w = u;
    for (size_t j = 0; j < u.size(); ++j) {
        const double saved = w[j];
        w[j] = saved + h;
        const double fp = f(w);
        w[j] = saved - h;
        const double fm = f(w);
        w[j] = saved;
        g[j] = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// Central difference of a scalar function of one real parameter.
inline double fd_directional(const std::function<double(double)>& f, double h) {
    return (f(h) - f(-h)) / (2.0 * h);
}

/// Composite Simpson quadrature of f over [0, T] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double period, int n = 4096) {
    if (n % 2 != 0) ++n;
    const double h = period / n;
    double s = f(0.0) + f(period);
    for (int k = 1; k < n; ++k) s += (k % 2 == 1 ? 4.0 : 2.0) * f(k * h);
    return s * h / 3.0;
}

/// Brute-force sup_{u} <u,v> - G(u) for scalar u by dense scan plus local
/// golden-section refinement.
inline double dense_conjugate_1d(const std::function<double(double)>& g, double v,
                                 double radius = 50.0) {
    auto phi = [&](double u) { return u * v - g(u); };
    double best_u = 0.0, best = phi(0.0);
    const int grid = 20000;
    for (int i = 0; i <= grid; ++i) {
        const double u = -radius + 2.0 * radius * i / grid;
        const double p = phi(u);
        if (p > best) {
            best = p;
            best_u = u;
        }
    }
    double a = best_u - 2.0 * radius / grid, b = best_u + 2.0 * radius / grid;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 200; ++it) {
        if (phi(c) > phi(d))
            b = d;
        else
            a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return phi(0.5 * (a + b));
}

}  // namespace oracles
