"""Smoke tests for the _dualact extension module (run with PYTHONPATH set to
the build directory, or after installing the wheel)."""

import json
import math
import sys

import _dualact as da


def approx(a, b, rel=1e-9):
    return abs(a - b) <= rel * (1.0 + abs(b))


def test_gfunction_basics():
    g = da.GFunction.power(2.0, 0.5, 2)
    assert g.dim == 2
    assert approx(g.value([3.0, 4.0]), 12.5)
    assert g.gradient([3.0, 4.0]) == [3.0, 4.0]
    star = g.conjugate()
    assert approx(star.value([3.0, 4.0]), 12.5)  # self-conjugate
    assert g.young_identity_residual([1.0, 2.0]) < 1e-12

    back = da.GFunction.from_json(g.to_json())
    assert approx(back.value([1.0, -2.0]), g.value([1.0, -2.0]), rel=1e-14)


def test_symplectic_and_indices():
    pair = da.GFunction.symplectic_power_pair(3.0)
    assert da.symplectic_test(pair)["symplectic"]
    idx = da.growth_indices(pair)
    assert 1.4 < idx["simonenko_p"] < 1.6
    assert 2.8 < idx["simonenko_q"] < 3.1

    d2 = da.delta2_certificate(da.GFunction.power(2.0, 0.5, 2))
    assert abs(d2["C"] - 4.0) < 1e-3 and d2["global"]


def test_closed_forms():
    assert approx(da.cg_closed_form(2.0), 1.0 / math.pi, rel=1e-12)
    assert approx(da.period_formula(2.0), 2.0 * math.pi, rel=1e-12)
    for p in (1.5, 3.0, 4.0):
        assert abs(da.period_formula(p) - da.period_formula_beta(p)) < 1e-12 * da.period_formula(p)


def test_luxemburg_norm():
    g = da.GFunction.power(2.0, 1.0, 1)  # |u|^2
    values = [[1.7] for _ in range(16)]
    assert approx(da.luxemburg_norm(g, 1.0, values), 1.7, rel=1e-8)
    assert approx(da.modular(g, 2.0, values), 2.0 * 1.7**2, rel=1e-12)


def test_estimate_cg():
    g = da.GFunction.power(2.0, 0.5, 2)
    est = da.estimate_cg(g, T=1.0, N=96, restarts=3, seed=5)
    assert abs(est["value"] - 1.0 / math.pi) < 0.01


def test_flow():
    g = da.GFunction.power(2.0, 0.5, 2)
    fr = da.flow_characterization(g, [1.0, 0.0])
    assert abs(fr["period"] - 2.0 * math.pi) < 1e-6
    assert abs(fr["ratio"] - 1.0 / math.pi) < 1e-6


def test_solve_and_check():
    spec = {
        "hamiltonian": {"id": "quadratic_forced"},
        "T": 1.0,
        "N": 64,
        "epsilon": 0.0,
        "solver": {"grad_tol": 1e-10},
    }
    res = da.solve(json.dumps(spec))
    assert res["hamiltonian_residual"] < 1e-6
    amp = 1.0 / (1.0 + 2.0 * math.pi)
    assert abs(res["u"][0][0] + amp) < 1e-5  # u(0) = (-amp, 0)

    bad = {"hamiltonian": {"id": "linear"}, "T": 1.0, "N": 16}
    rep = da.check_hypotheses(json.dumps(bad))
    assert rep["H1"] and not rep["H3"] and not rep["passed"]


def test_solve_phi():
    spec = {
        "T": 1.0,
        "phi": {"id": "power", "params": {"p": 2.0, "n": 1}},
        "potential": {"id": "quadratic_cos", "params": {"k": 0.5, "amplitude": 1.0}},
        "Lambda": 0.95,
        "cg": 1.0 / math.pi,
    }
    sol = da.solve_phi_laplacian(json.dumps(spec), N=64)
    amp = 1.0 / (4.0 * math.pi**2 - 0.5)
    assert abs(sol["q"][0][0] - amp) < 1e-4
    assert sol["el_residual"] < 1e-4


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
