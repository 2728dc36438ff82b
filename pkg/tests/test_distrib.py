import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from distmul.distrib import (
    Bump,
    PolyBump,
    ProductBump,
    VanishingAtOrigin,
    delta,
    derivative_at,
    hat,
    mollify,
)
from distmul.errors import UnsupportedOrder, UsageError
from distmul.mollifier import Kind, MollifierSpec
from distmul.quadrature import quad

PSI = Bump(center=(0.1,), s=1.0)


def _sympy_derivs(c=0.1, s=1.0, kmax=3):
    x = sp.symbols("x")
    f = sp.E * sp.exp(-1 / (1 - ((x - c) / s) ** 2))
    return [float(sp.diff(f, x, k).subs(x, 0)) for k in range(kmax + 1)]


EXACT = _sympy_derivs()


def test_bump_value_at_centre_is_one():
    assert Bump()(0.0) == pytest.approx(1.0)
    assert Bump(center=(0.0, 0.0))(0.0, 0.0) == pytest.approx(1.0)
    assert ProductBump(scale=math.e ** 2)(0.0, 0.0) == pytest.approx(1.0)
    assert Bump()(1.0) == 0.0


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_derivative_at_matches_sympy(k):
    assert derivative_at(PSI, k) == pytest.approx(EXACT[k], rel=1e-7, abs=1e-9)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_mollified_delta_converges_weakly(k):
    # int (delta^(k) * delta_n)(x) psi(x) dx -> (-1)^k psi^(k)(0)
    target = (-1) ** k * EXACT[k]
    errs = []
    for n in (4, 16, 64):
        fld = mollify(delta(k), MollifierSpec(4), 1.0, n)
        (lo, hi), = fld.support
        res = quad(lambda x: fld(x) * PSI.value_at(x), lo, hi, rel_tol=1e-12, abs_tol=1e-300,
                   points=(0.0,))
        errs.append(abs(res.value - target))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-3 * max(1.0, abs(target))


def test_mollified_hat_converges_uniformly():
    h = hat(-1.0, 1.0)
    xs = np.linspace(-1.5, 1.5, 31)
    exact = np.clip(1 - np.abs(xs), 0, None)
    prev = math.inf
    for n in (4, 16, 64):
        fld = mollify(h, MollifierSpec(2), 1.0, n)
        err = float(np.max(np.abs(fld(xs) - exact)))
        assert err < prev
        prev = err
    assert prev <= 2.0 / 64


def test_mollified_hat_preserves_mass():
    fld = mollify(hat(0.0, 2.0, coeff=3.0), MollifierSpec(2), 1.0, 8)
    (lo, hi), = fld.support
    res = quad(fld, lo, hi, rel_tol=1e-10, points=(0.0, 1.0, 2.0))
    assert res.value == pytest.approx(3.0, rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-3, 3), b=st.floats(-3, 3), x=st.floats(-0.6, 0.6))
def test_mollify_is_linear(a, b, x):
    spec = MollifierSpec(2)
    S, T = delta(), delta(1, 0.2)
    lhs = mollify(a * S + b * T, spec, 1.0, 3)(np.array([x]))
    rhs = a * mollify(S, spec, 1.0, 3)(np.array([x])) + b * mollify(T, spec, 1.0, 3)(np.array([x]))
    assert lhs == pytest.approx(rhs, abs=1e-12 * (1 + abs(a) + abs(b)) * 100)


def test_translation():
    spec = MollifierSpec(2)
    f = mollify(delta(1), spec, 1.0, 4)
    g = mollify(delta(1).shifted(0.3), spec, 1.0, 4)
    xs = np.linspace(-0.3, 0.3, 13)
    assert np.allclose(g(xs + 0.3), f(xs), rtol=0, atol=1e-13)


def test_test_function_variants():
    pb = PolyBump(Bump(), (1.0, 2.0))
    assert pb(0.5) == pytest.approx(Bump()(0.5) * 2.0)
    v = VanishingAtOrigin(Bump(), 0, 2)
    assert v(0.0) == 0.0
    assert v(0.5) == pytest.approx(0.25 * Bump()(0.5))
    assert ProductBump().axis_factors()[0].d == 1
    with pytest.raises(UsageError):
        pb.shifted(0.1)


def test_expression_validation():
    with pytest.raises(UsageError):
        delta() + delta(d=2)
    with pytest.raises(UnsupportedOrder):
        delta(9)
    with pytest.raises(UnsupportedOrder):
        mollify(delta((1, 0), d=2), MollifierSpec(2, Kind.RADIAL, 2), 1.0, 2)
    with pytest.raises(UsageError):
        mollify(hat(), MollifierSpec(2, Kind.PRODUCT, 2), 1.0, 2)
    expr = 2.0 * delta() - hat()
    assert len(expr.deltas) == 1 and len(expr.continuous) == 1 and not expr.delta_only
