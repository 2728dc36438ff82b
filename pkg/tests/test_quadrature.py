import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distmul.acceptance import KNOWN_INTEGRALS
from distmul.quadrature import (
    QuadRequest,
    integrate_1d,
    integrate_nd,
    integrate_radial,
    quad,
    sphere_area,
)


@pytest.mark.parametrize("rule", ["gk21", "gk15"])
@pytest.mark.parametrize("case", range(len(KNOWN_INTEGRALS)))
def test_error_estimate_is_honest(case, rule):
    f, a, b, exact = KNOWN_INTEGRALS[case]
    res = quad(f, a, b, rel_tol=1e-10, abs_tol=1e-14, max_subdivisions=5000, rule=rule)
    assert res.converged
    assert abs(res.value - exact) <= max(res.error_estimate, 4 * np.finfo(float).eps * abs(exact))
    assert abs(res.value - exact) <= 1e-9 * max(1.0, abs(exact))


def test_known_values_against_mpmath():
    mp.mp.dps = 30
    checks = {
        9: mp.quad(lambda x: mp.exp(-x * x), [-5, 5]),
        17: mp.quad(lambda x: mp.exp(1 / (x * x - 1)), [-1, 0, 1]),
        18: mp.quad(lambda x: mp.tanh(20 * x), [-1, 0, 2]),
    }
    for j, ref in checks.items():
        assert KNOWN_INTEGRALS[j][3] == pytest.approx(float(ref), rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(coeffs=st.lists(st.floats(-3, 3), min_size=1, max_size=32),
       a=st.floats(-2, 0), w=st.floats(0.1, 3))
def test_polynomials_integrated_exactly(coeffs, a, w):
    b = a + w
    p = np.polynomial.Polynomial(coeffs)
    exact = p.integ()(b) - p.integ()(a)
    scale = sum(abs(c) * max(abs(a), abs(b)) ** j for j, c in enumerate(coeffs)) * w
    res = quad(p, a, b, rel_tol=1e-12, abs_tol=1e-300)
    assert abs(res.value - exact) <= 1e-12 * max(scale, 1e-300) + 1e-300


def test_single_panel_degree_of_exactness():
    for rule, deg in (("gk21", 31), ("gk15", 22)):
        req = QuadRequest(lambda x: x ** deg + x ** (deg - 1), (0.0, 1.0), rule=rule,
                          max_subdivisions=1)
        res = integrate_1d(req)
        assert res.value == pytest.approx(1 / (deg + 1) + 1 / deg, rel=1e-14)


def test_zero_integrand_short_circuits():
    res = quad(lambda x: np.zeros_like(x), 0, 1)
    assert res.value == 0.0 and res.error_estimate == 0.0 and res.converged


def test_nonconvergence_is_reported():
    res = quad(lambda x: 1 / np.sqrt(np.abs(x - 0.3)) * np.sin(1 / np.abs(x - 0.3)),
               0, 1, rel_tol=1e-14, max_subdivisions=30)
    assert not res.converged


def test_deterministic_bits():
    f = lambda x: np.exp(np.sin(7 * x)) * np.abs(x - 0.2)  # noqa: E731
    r1 = quad(f, -1, 1, points=(0.2,))
    r2 = quad(f, -1, 1, points=(0.2,))
    assert r1 == r2


def test_2d_and_3d_boxes():
    res = integrate_nd(QuadRequest(lambda x, y: np.exp(x) * np.cos(y), ((0, 1), (0, math.pi / 2)),
                                   rel_tol=1e-11))
    assert res.value == pytest.approx(math.e - 1, rel=1e-10)
    assert abs(res.value - (math.e - 1)) <= res.error_estimate + 1e-15
    res = integrate_nd(QuadRequest(lambda x, y, z: x * y * z + 1, ((0, 1),) * 3, rel_tol=1e-10))
    assert res.value == pytest.approx(1.125, rel=1e-10)


def test_radial_integral_and_sphere_area():
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    res = integrate_radial(lambda r: np.ones_like(r), 3)
    assert res.value == pytest.approx(4 * math.pi / 3, rel=1e-12)


def test_request_validation():
    with pytest.raises(ValueError):
        QuadRequest(np.sin, (1.0, 0.0))
    with pytest.raises(ValueError):
        QuadRequest(np.sin, (0.0, 1.0), rule="simpson")
    with pytest.raises(ValueError):
        QuadRequest(np.sin, (0.0, 1.0), rel_tol=0.0)
    with pytest.raises(ValueError):
        integrate_nd(QuadRequest(lambda x: x, ((0.0, 1.0),)))
