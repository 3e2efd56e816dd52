#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dualact/gfunction.hpp"
#include "oracles.hpp"

using namespace dualact;

namespace {

constexpr double pi = std::numbers::pi;

GFunction exp_type() {
    return GFunction::custom(
        2, [](ConstSpan u) { return std::exp(dot(u, u)) - 1.0; },
        [](ConstSpan u) {
            Vec g(u.begin(), u.end());
            scale(2.0 * std::exp(dot(u, u)), g);
            return g;
        },
        "exp_type");
}

}  // namespace

TEST_CASE("evaluation of closed forms") {
    const GFunction half_sq = GFunction::power(2.0, 0.5, 2);
    CHECK(half_sq.value(Vec{3.0, 4.0}) == doctest::Approx(12.5).epsilon(1e-15));
    CHECK(half_sq.value(Vec{0.0, 0.0}) == 0.0);

    const GFunction mixed =
        GFunction::power_sum({{3.0, 1.0 / 3.0, 1}, {1.5, 2.0 / 3.0, 1}});
    CHECK(mixed.value(Vec{1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(half_sq.value(Vec{1.0}), DimensionMismatch);
}

TEST_CASE("gradients match closed forms and central differences") {
    const GFunction half_sq = GFunction::power(2.0, 0.5, 2);
    const Vec g = half_sq.gradient(Vec{3.0, 4.0});
    CHECK(g[0] == doctest::Approx(3.0));
    CHECK(g[1] == doctest::Approx(4.0));

    const GFunction cubic = GFunction::power(3.0, 1.0 / 3.0, 1);
    CHECK(cubic.gradient(Vec{2.0})[0] == doctest::Approx(4.0).epsilon(1e-14));

    // p < 2: minimal-norm subgradient at the block origin.
    const GFunction sub = GFunction::power(1.5, 1.0, 2);
    CHECK(max_abs(sub.gradient(Vec{0.0, 0.0})) == 0.0);

    Rng rng(11);
    const GFunction fams[] = {half_sq, cubic, GFunction::symplectic_power_pair(3.0),
                              GFunction::power(4.0, 0.25, 3)};
    for (const GFunction& g2 : fams) {
        auto pts = sample_points(rng, g2.dim(), 100, 1e-1, 1e1);
        for (const auto& u : pts) {
            const Vec grad = g2.gradient(u);
            const Vec fd = oracles::fd_gradient([&](ConstSpan w) { return g2.value(w); }, u, 1e-5);
            for (int j = 0; j < g2.dim(); ++j)
                CHECK(std::abs(grad[j] - fd[j]) < 1e-6 * (1.0 + norm2(grad)));
        }
    }
}

TEST_CASE("gradient satisfies the subgradient inequality on samples") {
    Rng rng(12);
    const GFunction g = GFunction::symplectic_power_pair(3.0);
    auto pts = sample_points(rng, g.dim(), 60, 1e-2, 1e2);
    for (size_t i = 0; i + 1 < pts.size(); i += 2) {
        const Vec& u = pts[i];
        const Vec& w = pts[i + 1];
        Vec diff(w.size());
        for (size_t j = 0; j < w.size(); ++j) diff[j] = w[j] - u[j];
        CHECK(g.value(w) >= g.value(u) + dot(g.gradient(u), diff) -
                                1e-9 * (1.0 + std::abs(g.value(w))));
    }
}

TEST_CASE("closed-form conjugates") {
    const GFunction half_sq = GFunction::power(2.0, 0.5, 2);
    const GFunction star = half_sq.conjugate();
    CHECK(half_sq.conjugate_is_closed_form());
    const Vec v{1.2, -0.7};
    CHECK(star.value(v) == doctest::Approx(half_sq.value(v)).epsilon(1e-15));  // self-conjugate

    // (|u|^3 / 3)* = |v|^{3/2} / (3/2), verified against a dense sup oracle.
    const GFunction cubic = GFunction::power(3.0, 1.0 / 3.0, 1);
    const GFunction cubic_star = cubic.conjugate();
    Rng rng(13);
    std::uniform_real_distribution<double> uv(-8.0, 8.0);
    for (int i = 0; i < 50; ++i) {
        const double v1 = uv(rng);
        const double closed = cubic_star.value(Vec{v1});
        CHECK(closed == doctest::Approx(std::pow(std::abs(v1), 1.5) / 1.5).epsilon(1e-12));
        const double brute = oracles::dense_conjugate_1d(
            [](double u) { return std::pow(std::abs(u), 3.0) / 3.0; }, v1);
        CHECK(std::abs(closed - brute) < 1e-6 * (1.0 + std::abs(closed)));
    }
}

TEST_CASE("scaling identity F(u) = a G(bu) - c conjugates to a G*(v/ab) + c") {
    const double a = 2.0, b = 3.0, c = 1.0;
    const GFunction g = GFunction::power(2.0, 0.5, 2);
    const GFunction f = GFunction::custom(
        2,
        [&, a, b, c](ConstSpan u) {
            Vec bu(u.begin(), u.end());
            scale(b, bu);
            return a * g.value(bu) - c;
        },
        [&, a, b](ConstSpan u) {
            Vec bu(u.begin(), u.end());
            scale(b, bu);
            Vec grad = g.gradient(bu);
            scale(a * b, grad);
            return grad;
        });
    const GFunction fstar = f.conjugate();
    CHECK_FALSE(f.conjugate_is_closed_form());
    const GFunction gstar = g.conjugate();
    Rng rng(17);
    for (const auto& v : sample_points(rng, 2, 25, 1e-1, 1e1)) {
        Vec w = v;
        scale(1.0 / (a * b), w);
        const double expected = a * gstar.value(w) + c;
        CHECK(fstar.value(v) == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("young identity residuals") {
    const GFunction half_sq = GFunction::power(2.0, 0.5, 2);
    CHECK(half_sq.young_identity_residual(Vec{1.0, 2.0}) < 1e-12);
    CHECK(half_sq.young_identity_residual(Vec{0.0, 0.0}) < 1e-12);

    const GFunction cubic = GFunction::power(3.0, 1.0 / 3.0, 1);
    CHECK(cubic.young_identity_residual(Vec{2.0}) < 1e-8);

    // < 1e-8 across 200 samples for every closed-form pair.
    Rng rng(19);
    const GFunction fams[] = {half_sq, cubic, GFunction::symplectic_power_pair(1.5),
                              GFunction::power(4.0, 0.25, 3)};
    for (const GFunction& g : fams)
        for (const auto& u : sample_points(rng, g.dim(), 200, 1e-2, 1e2))
            CHECK(g.young_identity_residual(u) < 1e-8 * (1.0 + std::abs(g.value(u))));

    // numerical conjugate path stays under the looser contract
    const GFunction custom_sq = GFunction::custom(
        2, [&](ConstSpan u) { return half_sq.value(u); },
        [&](ConstSpan u) { return half_sq.gradient(u); });
    for (const auto& u : sample_points(rng, 2, 40, 1e-1, 1e1))
        CHECK(custom_sq.young_identity_residual(u) < 1e-5 * (1.0 + custom_sq.value(u)));
}

TEST_CASE("gradient bound through the conjugate") {
    SUBCASE("quadratic, exact slack algebra") {
        const GFunction g = GFunction::power(2.0, 0.5, 2);
        Rng rng(23);
        auto samples = sample_points(rng, 2, 50, 1e-2, 1e1);
        const auto rep = conjugate_gradient_bound(g, g, 0.0, 0.0, 2.0, samples);
        CHECK(rep.violations == 0);
        // slack = G(2u) - G*(grad G(u)) = 2|u|^2 - |u|^2/2 >= 0
        CHECK(rep.min_slack >= 0.0);
    }
    SUBCASE("cubic at u = 1: lhs 2/3 vs rhs 8/3") {
        const GFunction g = GFunction::power(3.0, 1.0 / 3.0, 1);
        const auto rep = conjugate_gradient_bound(g, g, 0.0, 0.0, 2.0, {Vec{1.0}});
        CHECK(rep.violations == 0);
        const double lhs = g.conjugate().value(g.gradient(Vec{1.0}));
        CHECK(lhs == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
        CHECK(rep.min_slack == doctest::Approx(8.0 / 3.0 - 2.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("hypothesis failure when beta is too small") {
        const GFunction g = GFunction::power(2.0, 0.5, 2);
        const ConvexFunction h(
            2, [](ConstSpan u) { return 0.5 * dot(u, u) - 2.0; },
            [](ConstSpan u) { return Vec(u.begin(), u.end()); });
        CHECK_THROWS_AS(conjugate_gradient_bound(h, g, 1.0, 0.0, 2.0, {Vec{0.0, 0.0}}),
                        std::invalid_argument);
    }
}

TEST_CASE("delta_2 certificates") {
    const auto quad = delta2_certificate(GFunction::power(2.0, 0.5, 2));
    CHECK(quad.c == doctest::Approx(4.0).epsilon(1e-4));
    CHECK(quad.global);

    const auto cubic = delta2_certificate(GFunction::power(3.0, 1.0 / 3.0, 1));
    CHECK(cubic.c == doctest::Approx(8.0).epsilon(1e-4));
    CHECK(cubic.global);

    const auto e2 = delta2_certificate(exp_type(), 2.0);
    const auto e3 = delta2_certificate(exp_type(), 3.0);
    CHECK_FALSE(e2.global);
    CHECK(e3.c > 10.0 * e2.c);  // C grows with the sampling radius
}

TEST_CASE("symplectic residual test") {
    CHECK(symplectic_test(GFunction::symplectic_power_pair(3.0)).symplectic);
    CHECK(symplectic_test(GFunction::power(2.0, 0.5, 2)).symplectic);

    const GFunction both_cubic = GFunction::power_sum({{3.0, 1.0 / 3.0, 1}, {3.0, 1.0 / 3.0, 1}});
    const auto rep = symplectic_test(both_cubic);
    CHECK_FALSE(rep.symplectic);
    // residual at u = (1,1): G*(Ju) = 2 |1|^{1.5}/1.5 = 4/3 while G(u) = 2/3
    const GFunction star = both_cubic.conjugate();
    const double resid = std::abs(star.value(Vec{1.0, -1.0}) - both_cubic.value(Vec{1.0, 1.0}));
    CHECK(resid == doctest::Approx(4.0 / 3.0 - 2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("linear images of symplectic functions by symplectic matrices stay symplectic") {
    // G(u1, u2) = Phi(u1 + u2) + Phi*(u1 + 2 u2), A = [[1,1],[1,2]] (det 1).
    const GFunction pair = GFunction::symplectic_power_pair(3.0);
    Matrix a(2, 2);
    a.a = {1.0, 1.0, 1.0, 2.0};
    const GFunction image = GFunction::linear_image(pair, a);
    CHECK(symplectic_test(image).symplectic);
}

TEST_CASE("semi-symplectic certificates") {
    SUBCASE("symplectic input gives K = 1, C = 0") {
        const auto cert = semi_symplectic_certificate(GFunction::symplectic_power_pair(2.0));
        CHECK(cert.found());
        CHECK(cert.k == doctest::Approx(1.0));
        CHECK(cert.c == doctest::Approx(0.0));
        CHECK(cert.embedding_constant(1.0) == doctest::Approx(1.0));
    }
    SUBCASE("quadratic-plus-quartic split admits a finite certificate") {
        const GFunction g =
            GFunction::direct_sum({GFunction::power(2.0, 0.5, 1), GFunction::power(4.0, 0.25, 1)});
        SampleSpec spec;
        spec.radius_max = 1e2;  // keep the quartic within double range after K scaling
        const auto cert = semi_symplectic_certificate(g, spec);
        REQUIRE(cert.found());
        // re-verify on a fresh sample
        const GFunction star = g.conjugate();
        Rng rng(29);
        for (const auto& u : sample_points(rng, 2, 100, 1e-3, 1e2)) {
            Vec ku = u;
            scale(cert.k, ku);
            CHECK(star.value(apply_J(u)) <= g.value(ku) + cert.c + 1e-6 * (1.0 + cert.c));
        }
    }
}

TEST_CASE("growth indices") {
    SUBCASE("pure powers are exactly homogeneous") {
        for (double p : {2.0, 3.0}) {
            const auto idx = growth_indices(GFunction::power(p, 1.0 / p, 2));
            CHECK(idx.simonenko_p == doctest::Approx(p).epsilon(1e-9));
            CHECK(idx.simonenko_q == doctest::Approx(p).epsilon(1e-9));
            CHECK(idx.mo_alpha == doctest::Approx(p).epsilon(1e-3));
            CHECK(idx.mo_beta == doctest::Approx(p).epsilon(1e-3));
        }
        const auto quad = growth_indices(GFunction::power(2.0, 0.5, 2));
        CHECK(quad.k_eps == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("mixed pair attains min and max exponents") {
        const auto idx = growth_indices(GFunction::symplectic_power_pair(3.0));
        CHECK(idx.simonenko_p == doctest::Approx(1.5).epsilon(0.05));
        CHECK(idx.simonenko_q == doctest::Approx(3.0).epsilon(0.05));
        CHECK(idx.mo_alpha == doctest::Approx(1.5).epsilon(0.05));
        CHECK(idx.mo_beta == doctest::Approx(3.0).epsilon(0.05));
        CHECK(idx.simonenko_p <= idx.simonenko_q);
        CHECK(idx.mo_alpha <= idx.mo_beta);
    }

    SUBCASE("the sampled K certifies the two-sided power bound on fresh points") {
        const GFunction g = GFunction::symplectic_power_pair(3.0);
        const double eps = 0.1;
        const auto idx = growth_indices(g, {}, eps);
        Rng rng(149);
        std::uniform_real_distribution<double> ts(-8.0, 8.0);
        for (const auto& u : sample_points(rng, 2, 60, 1e-1, 1e1)) {
            const double t = std::exp2(ts(rng));
            const double lo = std::min(std::pow(t, idx.mo_beta + eps),
                                       std::pow(t, idx.mo_alpha - eps));
            const double hi = std::max(std::pow(t, idx.mo_beta + eps),
                                       std::pow(t, idx.mo_alpha - eps));
            Vec tu = u;
            scale(t, tu);
            const double gu = g.value(u);
            const double gtu = g.value(tu);
            CHECK(gtu >= lo * gu / idx.k_eps * (1.0 - 1e-9));
            CHECK(gtu <= hi * gu * idx.k_eps * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("conjugation properties on sampled points") {
    Rng rng(31);
    const GFunction g1 = GFunction::power(2.0, 0.5, 2);
    const GFunction g2 = GFunction::power(2.0, 1.0, 2);  // g1 <= g2 pointwise

    SUBCASE("order reversal") {
        const GFunction s1 = g1.conjugate();
        const GFunction s2 = g2.conjugate();
        for (const auto& v : sample_points(rng, 2, 50)) {
            CHECK(g1.value(v) <= g2.value(v) + 1e-12);
            CHECK(s2.value(v) <= s1.value(v) + 1e-12);
        }
    }

    SUBCASE("fenchel inequality including the scaled form") {
        const GFunction g = GFunction::symplectic_power_pair(3.0);
        const GFunction star = g.conjugate();
        auto pts = sample_points(rng, g.dim(), 60, 1e-2, 1e2);
        for (size_t i = 0; i + 1 < pts.size(); i += 2) {
            const Vec& u = pts[i];
            const Vec& v = pts[i + 1];
            const double uv = dot(u, v);
            for (double mu : {0.5, 1.0, 2.0})
                for (double nu : {0.5, 1.0, 2.0}) {
                    Vec us = u, vs = v;
                    scale(1.0 / mu, us);
                    scale(1.0 / nu, vs);
                    const double bound = mu * nu * (g.value(us) + star.value(vs));
                    CHECK(uv <= bound + 1e-9 * (1.0 + std::abs(bound)));
                    CHECK(uv >= -bound - 1e-9 * (1.0 + std::abs(bound)));
                }
        }
    }

    SUBCASE("biconjugation returns the original on every closed family") {
        Matrix q(2, 2);
        q.a = {2.0, 0.5, 0.5, 1.0};
        Matrix a(2, 2);
        a.a = {1.0, 1.0, 0.0, 1.0};
        const GFunction fams[] = {g1, GFunction::symplectic_power_pair(3.0),
                                  GFunction::quadratic(q, 1.5),
                                  GFunction::linear_image(g1, a)};
        for (const GFunction& g : fams) {
            const GFunction bi = g.conjugate().conjugate();
            for (const auto& u : sample_points(rng, g.dim(), 40))
                CHECK(bi.value(u) == doctest::Approx(g.value(u)).epsilon(1e-6));
        }
    }

    SUBCASE("gradient of the conjugate inverts the gradient") {
        const GFunction fams[] = {GFunction::symplectic_power_pair(3.0),
                                  GFunction::power(4.0, 0.25, 2)};
        for (const GFunction& g : fams) {
            const GFunction star = g.conjugate();
            for (const auto& u : sample_points(rng, g.dim(), 40, 1e-1, 1e1)) {
                const Vec back = star.gradient(g.gradient(u));
                for (size_t j = 0; j < u.size(); ++j)
                    CHECK(std::abs(back[j] - u[j]) < 1e-6 * (1.0 + norm2(u)));
            }
        }
    }

    SUBCASE("symplectic gradient identity grad G(u) = J^T grad G*(Ju)") {
        // differentiating G(u) = G*(Ju) gives grad G = J^T (grad G*)(J .)
        const GFunction g = GFunction::symplectic_power_pair(3.0);
        const GFunction star = g.conjugate();
        for (const auto& u : sample_points(rng, g.dim(), 40, 1e-1, 1e1)) {
            const Vec lhs = g.gradient(u);
            Vec rhs = apply_J(star.gradient(apply_J(u)));
            scale(-1.0, rhs);  // J^T = -J
            for (size_t j = 0; j < u.size(); ++j)
                CHECK(std::abs(lhs[j] - rhs[j]) < 1e-8 * (1.0 + norm2(lhs)));
        }
    }

    SUBCASE("scaling inequalities for G-functions") {
        const GFunction g = GFunction::symplectic_power_pair(3.0);
        std::uniform_real_distribution<double> us(0.05, 5.0);
        for (const auto& u : sample_points(rng, g.dim(), 40)) {
            double s1 = us(rng), s2 = us(rng);
            if (s1 > s2) std::swap(s1, s2);
            Vec a1 = u, a2 = u;
            scale(1.0 / s1, a1);
            scale(1.0 / s2, a2);
            CHECK(s2 * g.value(a2) <= s1 * g.value(a1) + 1e-9 * (1.0 + s1 * g.value(a1)));
            Vec b1 = u, b2 = u, b3 = u;
            scale(s1, b1);
            scale(s2, b2);
            scale(s1 + s2, b3);
            CHECK(g.value(b1) + g.value(b2) <= g.value(b3) + 1e-9 * (1.0 + g.value(b3)));
        }
    }
}

TEST_CASE("gfunction axioms hold for the shipped families") {
    CHECK(check_gfunction_axioms(GFunction::power(2.0, 0.5, 2)).passed);
    CHECK(check_gfunction_axioms(GFunction::symplectic_power_pair(1.5)).passed);
    SampleSpec narrow;
    narrow.radius_max = 2.0;
    CHECK(check_gfunction_axioms(exp_type(), narrow).passed);

    // A non-even candidate fails the sampled evenness check.
    const GFunction skewed = GFunction::custom(
        1, [](ConstSpan u) { return u[0] > 0 ? u[0] * u[0] : 2.0 * u[0] * u[0]; });
    CHECK_FALSE(check_gfunction_axioms(skewed).passed);
}

TEST_CASE("json round trip preserves evaluation") {
    Matrix q(2, 2);
    q.a = {2.0, 0.5, 0.5, 1.0};
    Matrix shear(2, 2);
    shear.a = {1.0, 1.0, 1.0, 2.0};
    const GFunction fams[] = {
        GFunction::power_sum({{3.0, 1.0 / 3.0, 1}, {1.5, 2.0 / 3.0, 2}}),
        GFunction::quadratic(q, 0.7),
        GFunction::linear_image(GFunction::symplectic_power_pair(3.0, 1), shear),
        GFunction::direct_sum({GFunction::power(2.0, 0.5, 1), GFunction::power(4.0, 0.25, 1)}),
    };
    Rng rng(37);
    for (const GFunction& g : fams) {
        const GFunction back = GFunction::from_json(g.to_json());
        CHECK(back.dim() == g.dim());
        for (const auto& u : sample_points(rng, g.dim(), 30))
            CHECK(back.value(u) == doctest::Approx(g.value(u)).epsilon(1e-12));
    }
    CHECK_THROWS(exp_type().to_json());
}
