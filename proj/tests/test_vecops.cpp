#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dualact/vecops.hpp"

using namespace dualact;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("spectral derivative is exact on band-limited signals") {
    const int n = 64;
    const double period = 1.0;
    Vec values(n), expect(n);
    for (int k = 0; k < n; ++k) {
        const double t = period * k / n;
        values[k] = std::sin(2.0 * pi * t);
        expect[k] = 2.0 * pi * std::cos(2.0 * pi * t);
    }
    const Vec d = periodic_derivative(values, n, 1, period, DerivRule::Spectral);
    for (int k = 0; k < n; ++k) CHECK(d[k] == doctest::Approx(expect[k]).epsilon(1e-12));
}

TEST_CASE("derivative of a constant vanishes and the dft path agrees with fft") {
    Vec values(48, 3.25);  // 48 is not a power of two: direct DFT branch
    const Vec d = periodic_derivative(values, 48, 1, 2.0, DerivRule::Spectral);
    CHECK(max_abs(d) < 1e-12);

    const int n = 60;
    Vec sig(n);
    for (int k = 0; k < n; ++k) sig[k] = std::cos(4.0 * pi * k / n);
    const Vec ds = periodic_derivative(sig, n, 1, 1.0, DerivRule::Spectral);
    for (int k = 0; k < n; ++k)
        CHECK(ds[k] == doctest::Approx(-4.0 * pi * std::sin(4.0 * pi * k / n)).epsilon(1e-10));
}

TEST_CASE("derivative transpose is the adjoint under the grid inner product") {
    Rng rng(5);
    const int n = 32;
    std::normal_distribution<double> gauss;
    for (DerivRule rule : {DerivRule::Spectral, DerivRule::ForwardDiff}) {
        Vec a(n), b(n);
        for (int k = 0; k < n; ++k) {
            a[k] = gauss(rng);
            b[k] = gauss(rng);
        }
        const Vec da = periodic_derivative(a, n, 1, 1.5, rule);
        const Vec dtb = periodic_derivative_transpose(b, n, 1, 1.5, rule);
        CHECK(dot(da, b) == doctest::Approx(dot(a, dtb)).epsilon(1e-11));
    }
}

TEST_CASE("antiderivative inverts the derivative on mean-zero signals") {
    const int n = 128;
    Vec values(n);
    for (int k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / n;
        values[k] = std::sin(2.0 * pi * t) + 0.3 * std::cos(6.0 * pi * t);
    }
    const Vec d = periodic_derivative(values, n, 1, 1.0, DerivRule::Spectral);
    const Vec back = periodic_antiderivative(d, n, 1, 1.0);
    for (int k = 0; k < n; ++k) CHECK(back[k] == doctest::Approx(values[k]).epsilon(1e-10));
}

TEST_CASE("lu solve round trips and rejects singular input") {
    Matrix m(3, 3);
    m.a = {4, 1, 0, 1, 3, -1, 0, -1, 2};
    const Vec b{1.0, -2.0, 0.5};
    const Vec x = solve_linear(m, b);
    const Vec mx = m.apply(x);
    for (int i = 0; i < 3; ++i) CHECK(mx[i] == doctest::Approx(b[i]).epsilon(1e-13));

    Matrix s(2, 2);
    s.a = {1, 2, 2, 4};
    CHECK_THROWS_AS(solve_linear(s, Vec{1, 1}), std::runtime_error);
}

TEST_CASE("canonical symplectic matrix squares to -identity") {
    Rng rng(7);
    const Vec u = random_direction(rng, 6);
    const Vec ju = apply_J(u);
    const Vec jju = apply_J(ju);
    for (size_t i = 0; i < u.size(); ++i) CHECK(jju[i] == doctest::Approx(-u[i]).epsilon(1e-15));
    CHECK(std::abs(dot(ju, u)) < 1e-14);  // <Ju, u> = 0
}
