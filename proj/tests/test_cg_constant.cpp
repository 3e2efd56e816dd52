#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dualact/cg_constant.hpp"
#include "dualact/orlicz.hpp"
#include "oracles.hpp"

using namespace dualact;

namespace {

constexpr double pi = std::numbers::pi;

Vec power_pair_start(double p) {
    // on the G = 1 level set of |u1|^p/p + |u2|^q/q
    return Vec{std::pow(p, 1.0 / p), 0.0};
}

}  // namespace

TEST_CASE("closed-form period of the p-oscillator") {
    CHECK(period_formula(2.0) == doctest::Approx(2.0 * pi).epsilon(1e-14));

    // sine and Beta forms agree to 1e-12 across a p grid
    for (double p : {1.2, 1.5, 2.0, 2.5, 3.0, 4.0, 7.5}) {
        const double sine = period_formula(p);
        const double beta = period_formula_beta(p);
        CHECK(std::abs(sine - beta) <= 1e-12 * sine);
    }

    // evaluated independently: 4 pi 2^{1/3} / (3 sin(pi/3))
    const double t3 = 4.0 * pi * std::cbrt(2.0) / (3.0 * std::sin(pi / 3.0));
    CHECK(period_formula(3.0) == doctest::Approx(t3).epsilon(1e-14));
    CHECK(period_formula(3.0) == doctest::Approx(6.0936).epsilon(1e-4));

    // p and its conjugate exponent share the period
    for (double p : {1.5, 3.0, 4.0, 1.25}) {
        const double q = p / (p - 1.0);
        CHECK(period_formula(p) == doctest::Approx(period_formula(q)).epsilon(1e-13));
    }

    CHECK_THROWS_AS(period_formula(1.0), std::invalid_argument);
    CHECK_THROWS_AS(period_formula_beta(0.5), std::invalid_argument);
}

TEST_CASE("closed-form C_G for scalar power pairs") {
    CHECK(cg_closed_form(2.0) == doctest::Approx(1.0 / pi).epsilon(1e-14));

    const double c3 = 3.0 * (std::sqrt(3.0) / 2.0) / (2.0 * pi * std::cbrt(2.0));
    CHECK(cg_closed_form(3.0) == doctest::Approx(c3).epsilon(1e-14));
    CHECK(cg_closed_form(3.0) == doctest::Approx(0.3281).epsilon(1e-3));

    for (double p : {1.5, 3.0, 4.0}) {
        const double q = p / (p - 1.0);
        CHECK(cg_closed_form(p) == doctest::Approx(cg_closed_form(q)).epsilon(1e-13));
        CHECK(cg_closed_form(p) == doctest::Approx(2.0 / period_formula(p)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(cg_closed_form(0.9), std::invalid_argument);
}

TEST_CASE("lower bound for the skew quadratic form") {
    SUBCASE("sharp equality on the circle at T = 2 pi") {
        const double period = 2.0 * pi;
        const GFunction g = GFunction::power(2.0, 0.5, 2);
        const Trajectory u = Trajectory::sample(period, 128, 2, [](double t) {
            return Vec{std::sin(t), std::cos(t)};
        });
        const Trajectory du = u.derivative();
        double lhs = 0.0, mod = 0.0;
        for (int k = 0; k < 128; ++k) {
            const Vec jdu = apply_J(du.node(k));
            lhs += dot(jdu, u.node(k));
            Vec tdu(2);
            for (int j = 0; j < 2; ++j) tdu[j] = period * du.at(k, j);
            mod += g.value(tdu);
        }
        lhs *= period / 128;
        mod *= period / 128;
        CHECK(lhs == doctest::Approx(-2.0 * pi).epsilon(1e-12));
        const double cg_t = (1.0 / pi) / period;  // C_G(T) = C_G(1) / T
        CHECK(lhs >= -cg_t * mod - 1e-9);
        CHECK(lhs == doctest::Approx(-cg_t * mod).epsilon(1e-10));  // equality: optimal orbit
    }

    SUBCASE("constant trajectories cost nothing") {
        const GFunction g = GFunction::power(2.0, 0.5, 2);
        const auto rep = quadratic_form_lower_bound(g, 1, 1.0, 16, 5);
        CHECK(rep.violations == 0);
    }

    SUBCASE("random sweeps with the symplectic constants (2/T, 0)") {
        for (const GFunction& g :
             {GFunction::power(2.0, 0.5, 2), GFunction::symplectic_power_pair(3.0)}) {
            for (double period : {1.0, 2.0 * pi}) {
                const auto rep = quadratic_form_lower_bound(g, 200, period, 64, 19);
                CHECK(rep.c1 == doctest::Approx(2.0 / period));
                CHECK(rep.violations == 0);
                CHECK(rep.worst_margin >= 0.0);
            }
        }
    }

    SUBCASE("semi-symplectic constants from a certificate") {
        const GFunction g =
            GFunction::direct_sum({GFunction::power(2.0, 0.5, 1), GFunction::power(4.0, 0.25, 1)});
        const auto rep = quadratic_form_lower_bound(g, 100, 1.0, 64, 23);
        CHECK(rep.violations == 0);
    }
}

TEST_CASE("ratio minimization estimates C_G") {
    SUBCASE("quadratic at T = 1") {
        const GFunction g = GFunction::power(2.0, 0.5, 2);
        const CgEstimate est = estimate_cg_ratio(g, 1.0, 128, 4, 11);
        CHECK(est.value == doctest::Approx(1.0 / pi).epsilon(1e-2));
        CHECK(est.method == "ratio-minimization");
        // the certificate orbit achieves the reported ratio
        const Trajectory& u = est.certificate_orbit;
        const Trajectory du = u.derivative();
        double f = 0.0, m = 0.0;
        for (int k = 0; k < u.samples(); ++k) {
            f += dot(apply_J(du.node(k)), u.node(k));
            Vec tdu(2);
            for (int j = 0; j < 2; ++j) tdu[j] = du.at(k, j);
            m += g.value(tdu);
        }
        f /= u.samples();
        m /= u.samples();
        CHECK(f / m <= -est.value + 1e-8);
    }

    SUBCASE("scaling law C_G(T) = C_G(1)/T") {
        const GFunction g = GFunction::power(2.0, 0.5, 2);
        CgOptions opts;
        opts.restarts = 4;
        opts.seed = 29;
        opts.cross_check_scaling = true;
        const CgEstimate est = estimate_cg_ratio(g, 1.0, 96, opts);
        CHECK(est.scaling_check == doctest::Approx(est.value).epsilon(1e-2));
    }

    SUBCASE("conjugate family gives the same constant") {
        const GFunction g = GFunction::symplectic_power_pair(3.0);
        const CgEstimate direct = estimate_cg_ratio(g, 1.0, 128, 5, 31);
        const CgEstimate conj = estimate_cg_ratio(g.conjugate(), 1.0, 128, 5, 37);
        CHECK(direct.value == doctest::Approx(cg_closed_form(3.0)).epsilon(0.02));
        CHECK(conj.value == doctest::Approx(direct.value).epsilon(0.02));
    }

    SUBCASE("non-symplectic input is rejected") {
        const GFunction g = GFunction::power(3.0, 1.0 / 3.0, 2);
        CHECK_THROWS_AS(estimate_cg_ratio(g, 1.0, 64, 2, 41), std::invalid_argument);
    }

    SUBCASE("multi-start pool width does not change the result") {
        const GFunction g = GFunction::symplectic_power_pair(3.0);
        unsetenv("DUAL_ACTION_THREADS");
        const CgEstimate serial = estimate_cg_ratio(g, 1.0, 64, 4, 33);
        setenv("DUAL_ACTION_THREADS", "4", 1);
        const CgEstimate pooled = estimate_cg_ratio(g, 1.0, 64, 4, 33);
        unsetenv("DUAL_ACTION_THREADS");
        CHECK(serial.value == pooled.value);  // bitwise, seed-ordered reduction
        CHECK(serial.certificate_orbit.values() == pooled.certificate_orbit.values());
    }
}

TEST_CASE("constrained problem (P)") {
    const GFunction g = GFunction::power(2.0, 0.5, 2);

    SUBCASE("A(gamma)/gamma is the quadratic constant at several gamma") {
        for (double gamma : {0.5, 1.0, 2.0}) {
            const ConstrainedSolution cs = solve_constrained_p(g, gamma, 1.0, 64, 3, 43);
            CHECK(cs.a_gamma < 0.0);
            CHECK(cs.a_gamma / gamma == doctest::Approx(-1.0 / pi).epsilon(2e-2));
            CHECK(cs.lambda < 0.0);
            CHECK(cs.constraint_residual < 1e-6 * gamma);
        }
    }

    SUBCASE("multiplier matches the orbit period: T_u = -1/lambda") {
        const ConstrainedSolution cs = solve_constrained_p(g, 1.0, 1.0, 64, 3, 47);
        CHECK(-1.0 / cs.lambda == doctest::Approx(2.0 * pi).epsilon(0.01));
        CHECK(cs.stationarity_residual < 1e-4);
    }

    SUBCASE("gamma-independence of A(gamma)/gamma for a degree-2 family") {
        // quadratic with anisotropic symplectic matrix diag(kappa, 1/kappa)
        Matrix q(2, 2);
        q.a = {2.0, 0.0, 0.0, 0.5};
        const GFunction gq = GFunction::quadratic(q, 1.0);
        REQUIRE(symplectic_test(gq).symplectic);
        const ConstrainedSolution a = solve_constrained_p(gq, 0.7, 1.0, 64, 3, 53);
        const ConstrainedSolution b = solve_constrained_p(gq, 1.9, 1.0, 64, 3, 59);
        CHECK(a.a_gamma / 0.7 == doctest::Approx(b.a_gamma / 1.9).epsilon(2e-2));
    }
}

TEST_CASE("flow characterization") {
    SUBCASE("quadratic: every orbit is the 2 pi circle with ratio 1/pi") {
        const GFunction g = GFunction::power(2.0, 0.5, 2);
        const FlowResult fr = flow_characterization(g, Vec{1.3, 0.0});
        CHECK(fr.orbit.period == doctest::Approx(2.0 * pi).epsilon(1e-9));
        CHECK(fr.ratio == doctest::Approx(1.0 / pi).epsilon(1e-8));
        CHECK(fr.orbit.energy_drift < 1e-10);
    }

    SUBCASE("scalar p-blocks are isochronous with the closed-form period") {
        for (double p : {1.5, 3.0}) {
            const GFunction g = GFunction::symplectic_power_pair(p);
            FlowOptions opts;
            opts.reference_period = period_formula(p);
            const FlowResult fr = flow_characterization(g, power_pair_start(p), opts);
            CHECK(fr.orbit.period ==
                  doctest::Approx(period_formula(p)).epsilon(1e-3));
            CHECK(fr.ratio == doctest::Approx(cg_closed_form(p)).epsilon(1e-2));
            CHECK(fr.orbit.energy_drift < 1e-8);

            // isochronous: a different starting amplitude, same period
            Vec other{0.4 * std::pow(p, 1.0 / p), 0.0};
            const FlowResult fr2 = flow_characterization(g, other, opts);
            CHECK(fr2.orbit.period == doctest::Approx(fr.orbit.period).epsilon(1e-6));
        }
    }

    SUBCASE("vector p-laplacian circular solutions have period 2 pi and ratio 1/pi") {
        const double p = 3.0;
        const GFunction g = GFunction::symplectic_power_pair(p, 2);
        // u1(0) = (a, 0), du1/dt(0) = (0, a) with a = 1: u2 = |du1|^{p-2} du1
        const Vec u0{1.0, 0.0, 0.0, 1.0};
        const FlowResult fr = flow_characterization(g, u0);
        CHECK(fr.orbit.period == doctest::Approx(2.0 * pi).epsilon(1e-6));
        CHECK(fr.ratio == doctest::Approx(1.0 / pi).epsilon(1e-6));
    }

    SUBCASE("energy is conserved along the resampled orbit") {
        const GFunction g = GFunction::symplectic_power_pair(3.0);
        FlowOptions opts;
        opts.reference_period = period_formula(3.0);
        const FlowResult fr = flow_characterization(g, power_pair_start(3.0), opts);
        double worst = 0.0;
        for (int k = 0; k < fr.orbit.u.samples(); ++k)
            worst = std::max(worst, std::abs(g.value(fr.orbit.u.node(k)) - fr.orbit.energy));
        CHECK(worst < 1e-6);  // includes linear resampling error
    }

    SUBCASE("an equilibrium start is rejected") {
        const GFunction g = GFunction::power(2.0, 0.5, 2);
        CHECK_THROWS_AS(flow_characterization(g, Vec{0.0, 0.0}), std::invalid_argument);
    }
}

TEST_CASE("the ratio estimate dominates sampled orbit ratios") {
    const double p = 3.0;
    const GFunction g = GFunction::symplectic_power_pair(p);
    FlowOptions opts;
    opts.reference_period = period_formula(p);
    const FlowResult fr = flow_characterization(g, power_pair_start(p), opts);
    const CgEstimate est = estimate_cg_ratio(g, 1.0, 128, 5, 61);
    CHECK(est.value >= fr.ratio - 0.02 * fr.ratio);
}

TEST_CASE("simonenko sandwich") {
    SUBCASE("quadratic case is tight") {
        const GFunction g = GFunction::power(2.0, 0.5, 2);
        const FlowResult fr = flow_characterization(g, Vec{1.0, 0.0});
        const SandwichReport rep = simonenko_sandwich(g, {fr.orbit}, 1.0 / pi);
        CHECK(rep.lower == doctest::Approx(1.0 / pi).epsilon(1e-3));
        CHECK(rep.upper == doctest::Approx(1.0 / pi).epsilon(1e-3));
        CHECK(rep.contains_estimate);
        CHECK(rep.single_orbit);
    }

    SUBCASE("p = 3 scalar blocks contain the closed form") {
        const double p = 3.0;
        const GFunction g = GFunction::symplectic_power_pair(p);
        FlowOptions opts;
        opts.reference_period = period_formula(p);
        const FlowResult fr = flow_characterization(g, power_pair_start(p), opts);
        const SandwichReport rep = simonenko_sandwich(g, {fr.orbit}, cg_closed_form(p));
        CHECK(rep.lower <= cg_closed_form(p));
        CHECK(cg_closed_form(p) <= rep.upper);
        CHECK(rep.contains_estimate);
    }

    CHECK_THROWS_AS(simonenko_sandwich(GFunction::power(2.0, 0.5, 2), {}, 0.3),
                    std::invalid_argument);
}
