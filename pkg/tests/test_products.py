from dataclasses import dataclass

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distmul.distrib import Bump, PolyBump, ProductBump, delta, hat
from distmul.errors import UsageError
from distmul.mollifier import Kind, MollifierSpec
from distmul.products import (
    ProductKind,
    ProductQuery,
    continuous_product_check,
    eval_product_at_n,
    naive_product_at_n,
    symmetry_check,
)

OFF = Bump(center=(0.15,), s=1.2)

NAIVE_CASES = [
    (delta(), delta(), MollifierSpec(2), "sym", 1.5, 1.0, Bump()),
    (delta(), delta(1), MollifierSpec(4), "direct", 1.5, 1.0, OFF),
    (delta(1, 0.05), delta(2), MollifierSpec(4), "exchange", 2.0, 1.0, OFF),
    (delta() + 0.5 * delta(1, -0.1), delta(1), MollifierSpec(2), "sym", 1.2, 1.0, OFF),
    (delta(), delta(), MollifierSpec(2), "legacy", 2.0, 1.0, Bump()),
    (delta(1), delta(2, 0.1), MollifierSpec(4), "legacy", 3.0, 1.0, OFF),
    (delta(), hat(-0.5, 1.0), MollifierSpec(2), "sym", 1.5, 1.0, OFF),
    (hat(-1.0, 0.5), hat(-0.5, 1.0, 2.0), MollifierSpec(2), "direct", 1.5, 1.0, OFF),
]


@pytest.mark.parametrize("case", range(len(NAIVE_CASES)))
@pytest.mark.parametrize("n", [2, 8])
def test_rescaled_matches_naive(case, n):
    S, T, spec, kind, a, b, psi = NAIVE_CASES[case]
    q = ProductQuery(S, T, spec, kind, a, b, psi)
    fast = eval_product_at_n(q, n).value
    slow = naive_product_at_n(q, n)
    assert fast == pytest.approx(slow, rel=1e-8, abs=1e-10)


def test_naive_refuses_large_n():
    q = ProductQuery(delta(), delta(), MollifierSpec(2), "sym", 1.5, 1.0, Bump())
    with pytest.raises(ValueError):
        naive_product_at_n(q, 32)


@settings(max_examples=15, deadline=None)
@given(c=st.floats(-0.5, 0.5), n=st.sampled_from([4, 32, 256]))
def test_translation_invariance(c, n):
    S, T = delta(1), delta(0, 0.05)
    q0 = ProductQuery(S, T, MollifierSpec(4), "sym", 1.7, 1.0, OFF)
    q1 = ProductQuery(S.shifted(c), T.shifted(c), MollifierSpec(4), "sym", 1.7, 1.0,
                      OFF.shifted(c))
    v0, v1 = eval_product_at_n(q0, n), eval_product_at_n(q1, n)
    assert v1.value == pytest.approx(v0.value, rel=1e-8, abs=1e-9 * v0.abs_scale + 1e-300)


@settings(max_examples=15, deadline=None)
@given(a=st.floats(-4, 4), b=st.floats(-4, 4))
def test_bilinearity(a, b):
    spec, n = MollifierSpec(4), 16
    S1, S2, T = delta(), delta(1, 0.02), delta(2)

    def ev(S):
        return eval_product_at_n(ProductQuery(S, T, spec, "sym", 1.5, 1.0, OFF), n)

    lhs = ev(a * S1 + b * S2)
    r1, r2 = ev(S1), ev(S2)
    assert lhs.value == pytest.approx(a * r1.value + b * r2.value,
                                      abs=1e-9 * (abs(a) * r1.abs_scale + abs(b) * r2.abs_scale)
                                      + 1e-300)


@pytest.mark.parametrize("n", [4, 16, 64])
def test_index_swap_identities(n):
    q = ProductQuery(delta(), delta(1), MollifierSpec(4), "direct", 1.5, 1.0, OFF)
    r = symmetry_check(q, n)
    assert r["direct"] != 0.0
    assert r["direct_vs_exchange"] <= 1e-10
    assert r["direct_swap"] <= 1e-10
    assert r["exchange_swap"] <= 1e-10


@dataclass(frozen=True)
class _Opaque(Bump):
    """Same function, but hides the structure that enables the fast paths."""

    def axis_factors(self):
        return None

    def radial_about(self, point):
        return None


@dataclass(frozen=True)
class _OpaqueProduct(ProductBump):
    def axis_factors(self):
        return None


@pytest.mark.parametrize("n", [2, 4])
def test_factorized_path_matches_2d_quadrature(n):
    spec = MollifierSpec(2, Kind.PRODUCT, 2)
    S, T = delta((1, 0), d=2), delta((0, 1), x0=(0.05, 0.0), d=2)
    kw = dict(center=(0.1, -0.1), s=1.0, scale=7.0)
    fast = eval_product_at_n(ProductQuery(S, T, spec, "sym", 1.5, 1.0, ProductBump(**kw)), n)
    slow = eval_product_at_n(ProductQuery(S, T, spec, "sym", 1.5, 1.0, _OpaqueProduct(**kw)), n)
    assert fast.value == pytest.approx(slow.value, rel=1e-7)


@pytest.mark.parametrize("n", [2, 4])
def test_radial_path_matches_2d_quadrature(n):
    spec = MollifierSpec(2, Kind.RADIAL, 2)
    S, T = delta(d=2), delta(d=2)
    fast = eval_product_at_n(ProductQuery(S, T, spec, "sym", 2.0, 1.0, Bump((0.0, 0.0))), n)
    slow = eval_product_at_n(ProductQuery(S, T, spec, "sym", 2.0, 1.0, _Opaque((0.0, 0.0))), n)
    assert fast.value == pytest.approx(slow.value, rel=1e-7)


def test_disjoint_supports_give_zero():
    q = ProductQuery(delta(), delta(0, 0.6), MollifierSpec(2), "sym", 1.5, 1.0, Bump())
    assert eval_product_at_n(q, 8).value == 0.0


def test_polynomial_test_function_picks_up_derivative():
    # delta' . delta with psi = bump * x at alpha = 1.5 probes psi'(0) = 1
    q = ProductQuery(delta(1), delta(), MollifierSpec(4), "direct", 5 / 4, 1.0,
                     PolyBump(Bump(), (0.0, 1.0)))
    assert eval_product_at_n(q, 64).value != 0.0


def test_continuous_product_tends_to_pointwise_integral():
    r = continuous_product_check(hat(-1.0, 1.0), hat(-0.5, 1.5, 2.0), MollifierSpec(2), 2.0, 1.0,
                                 Bump(s=1.5), ns=(4, 8, 16, 32))
    d = r["deviations"]
    assert d[0] > d[1] > d[2] > d[3]
    assert d[-1] <= 1e-2 * abs(r["target"])


def test_query_validation():
    with pytest.raises(UsageError):
        ProductQuery(delta(), delta(d=2), MollifierSpec(2), "sym", 1.0, 1.0, Bump())
    with pytest.raises(UsageError):
        ProductQuery(delta(), delta(), MollifierSpec(2), "sym", 0.0, 1.0, Bump())
    with pytest.raises(UsageError):
        ProductQuery(delta(), hat(), MollifierSpec(2), "legacy", 2.0, 1.0, Bump())
    with pytest.raises(UsageError):
        eval_product_at_n(ProductQuery(delta(), delta(), MollifierSpec(2), "sym", 1, 1, Bump()), 0)
    assert ProductQuery(delta(), delta(), MollifierSpec(2), "sym", 1, 1, Bump()).kind \
        is ProductKind.SYM
