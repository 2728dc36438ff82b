import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distmul.distrib import Bump, derivative_at
from distmul.errors import UnsupportedOrder
from distmul.quadrature import quad
from distmul.regularize import cauchy_reduce, cauchy_value


def test_poisson_kernel():
    x = np.linspace(-2, 2, 41)
    eps = 0.3
    assert np.allclose(cauchy_value(0, x, eps), eps / (math.pi * (x * x + eps * eps)),
                       rtol=1e-14, atol=0)
    assert cauchy_reduce(0, 0.1).value(0.0) == pytest.approx(1 / (math.pi * 0.1))


@pytest.mark.parametrize("k", range(6))
def test_field_is_derivative_of_previous(k):
    eps, h = 0.2, 1e-5
    x = np.linspace(-1.0, 1.0, 21)
    fd = (cauchy_value(k, x + h, eps) - cauchy_value(k, x - h, eps)) / (2 * h)
    scale = np.max(np.abs(cauchy_value(k + 1, x, eps)))
    assert np.max(np.abs(fd - cauchy_value(k + 1, x, eps))) <= 1e-6 * scale


@settings(max_examples=100, deadline=None)
@given(k=st.integers(0, 8), x=st.floats(-5, 5), eps=st.floats(1e-3, 2), lam=st.floats(0.1, 10))
def test_homogeneity_and_parity(k, x, eps, lam):
    v = cauchy_value(k, x, eps)
    assert cauchy_value(k, lam * x, lam * eps) == pytest.approx(lam ** -(k + 1) * v, rel=1e-11,
                                                                abs=1e-300)
    assert cauchy_value(k, -x, eps) == (-1) ** k * v


@pytest.mark.parametrize("eps", [1e-1, 1e-2, 1e-4])
def test_poisson_mass_on_interval(eps):
    res = quad(cauchy_reduce(0, eps), -1, 1, rel_tol=1e-13, abs_tol=1e-300, points=(0.0,))
    assert res.value == pytest.approx(2 / math.pi * math.atan(1 / eps), rel=1e-11)


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_weak_convergence_to_delta_derivative(k):
    psi = Bump(center=(0.1,))
    target = (-1) ** k * derivative_at(psi, k)
    errs = []
    for eps in (1e-2, 1e-3, 1e-4):
        fld = cauchy_reduce(k, eps)
        pts = [0.0] + [s * eps * 4.0 ** j for j in range(8) for s in (1, -1)]
        res = quad(lambda x: fld(x) * psi.value_at(x), -0.9, 1.1, rel_tol=1e-10,
                   abs_tol=1e-300, points=pts, cancel_tol=1e-13)
        errs.append(abs(res.value - target))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] <= 1e-3 * abs(target)


def test_errors():
    with pytest.raises(UnsupportedOrder):
        cauchy_reduce(9, 0.1)
    with pytest.raises(ValueError):
        cauchy_reduce(0, 0.0)
