"""Product sequences of two distributions tested against a test function.

Four products are available:

* ``DIRECT``   ``int S_n^(alpha) T_n^(beta) psi``
* ``EXCHANGE`` ``int S_n^(beta) T_n^(alpha) psi``
* ``SYM``      half the sum of the two above
* ``LEGACY``   ``1/2 int [S_n^(beta) T_red(., n**-alpha) + T_n^(beta) S_red(., n**-alpha)] psi``

Delta-delta terms are always integrated in rescaled coordinates
``u = n**a (x - x0)`` around the narrower factor (the one with the larger
exponent ``a``).  The integration domain is then the fixed box ``[-1, 1]^d``
and the power ``n**rho`` produced by the substitution is applied once, after
the quadrature; :attr:`SequenceSample.rescale_exponent` records ``rho``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .distrib import (
    ContinuousTerm,
    DeltaDeriv,
    DistributionExpr,
    TestFunction,
    mollified_continuous,
    mollify,
)
from .errors import NumericalError, UsageError
from .mollifier import Kind, MollifierSpec, phi, radial_phi
from .quadrature import QuadRequest, integrate_nd, integrate_radial, quad
from .regularize import cauchy_value

__all__ = [
    "ProductKind",
    "ProductQuery",
    "SequenceSample",
    "continuous_product_check",
    "eval_product_at_n",
    "naive_product_at_n",
    "symmetry_check",
]

CANCEL_TOL = 1e-12


class ProductKind(enum.Enum):
    SYM = "sym"
    DIRECT = "direct"
    EXCHANGE = "exchange"
    LEGACY = "legacy"


@dataclass(frozen=True)
class ProductQuery:
    S: DistributionExpr
    T: DistributionExpr
    spec: MollifierSpec
    kind: ProductKind
    alpha: float
    beta: float
    psi: TestFunction
    rel_tol: float = 1e-10

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", ProductKind(self.kind))
        dims = {self.S.d, self.T.d, self.spec.d, self.psi.d}
        if len(dims) != 1:
            raise UsageError(f"dimension mismatch among S, T, mollifier and psi: {sorted(dims)}")
        if self.alpha <= 0 or self.beta <= 0:
            raise UsageError("alpha and beta must be positive")
        if self.kind is ProductKind.LEGACY:
            if self.spec.d != 1:
                raise UsageError("the Cauchy-regularised product is one-dimensional")
            if not (self.S.delta_only and self.T.delta_only):
                raise UsageError("the Cauchy-regularised product takes delta terms only")

    def with_exponents(self, alpha, beta):
        return ProductQuery(self.S, self.T, self.spec, self.kind, alpha, beta, self.psi,
                            self.rel_tol)


@dataclass(frozen=True)
class SequenceSample:
    n: int
    value: float
    quad_error: float
    rescale_exponent: float
    # n**rho * int |integrand|; the size a cancelled value is judged against
    abs_scale: float = 0.0


@dataclass(frozen=True)
class _Part:
    value: float
    error: float
    absv: float
    exponent: float


_ZERO = _Part(0.0, 0.0, 0.0, 0.0)


def _combine(parts):
    parts = list(parts)
    if not parts:
        return _ZERO
    return _Part(math.fsum(p.value for p in parts), math.fsum(p.error for p in parts),
                 math.fsum(p.absv for p in parts), max(p.exponent for p in parts))


def _check(res, what):
    if not res.converged:
        raise NumericalError(f"quadrature for {what} did not converge "
                             f"(estimate {res.value:.6g} +/- {res.error_estimate:.3g})",
                             res.value, res.error_estimate)
    return res


def _scaled(coeff, n, rho, res):
    f = coeff * float(n) ** rho
    return _Part(f * res.value, abs(f) * res.error_estimate, abs(f) * res.abs_value, rho)


def _psi_edges(psi, scale, x0, axis=0):
    lo, hi = psi.support()[axis]
    return (scale * (lo - x0), scale * (hi - x0))


# -- delta x delta ----------------------------------------------------------------

def _delta_pair_1d(m, k, a, x0, l, b, x1, psi, n, rel_tol):
    """``int n^{a(k+1)} Phi^(k)(n^a(x-x0)) n^{b(l+1)} Phi^(l)(n^b(x-x1)) psi(x) dx`` with a >= b."""
    na = float(n) ** a
    t = float(n) ** (b - a)
    c = float(n) ** b * (x0 - x1)
    rho = a * k + b * (l + 1)

    def f(u):
        return phi(m, k, u) * phi(m, l, t * u + c) * psi.value_at(x0 + u / na)

    pts = [0.0, (1.0 - c) / t, (-1.0 - c) / t, -c / t, *_psi_edges(psi, na, x0)]
    res = quad(f, -1.0, 1.0, rel_tol=rel_tol, abs_tol=1e-300, points=pts, cancel_tol=CANCEL_TOL)
    return rho, _check(res, "a delta-delta pair")


def _disjoint(p0, p1, a, b, n):
    return any(abs(u - v) >= float(n) ** -a + float(n) ** -b for u, v in zip(p0, p1))


def _delta_pair(s: DeltaDeriv, a, t: DeltaDeriv, b, spec: MollifierSpec, psi, n, rel_tol):
    """One term of ``int S_n^(a) T_n^(b) psi`` for delta terms ``s`` and ``t``."""
    if b > a:
        s, a, t, b = t, b, s, a
    coeff = s.coeff * t.coeff
    m, d = spec.m, spec.d
    if spec.kind is Kind.RADIAL:
        rho = d * b
    else:
        rho = a * s.total_order + b * (t.total_order + d)
    if _disjoint(s.point, t.point, a, b, n):
        return _Part(0.0, 0.0, 0.0, rho)

    if spec.kind is Kind.ONE_D:
        rho, res = _delta_pair_1d(m, s.order[0], a, s.point[0], t.order[0], b, t.point[0],
                                  psi, n, rel_tol)
        return _scaled(coeff, n, rho, res)

    if spec.kind is Kind.PRODUCT:
        factors = psi.axis_factors()
        if factors is not None:
            return _product_factorized(s, a, t, b, m, factors, n, rel_tol)
        return _delta_pair_nd(s, a, t, b, spec, psi, n, rel_tol, rho)

    profile = psi.radial_about(s.point) if s.point == t.point else None
    if profile is not None:
        na = float(n) ** a
        tt = float(n) ** (b - a)
        res = integrate_radial(
            lambda r: radial_phi(m, d, r) * radial_phi(m, d, tt * r) * profile(r / na),
            d, rel_tol=rel_tol, abs_tol=1e-300)
        return _scaled(coeff, n, rho, _check(res, "a radial delta pair"))
    return _delta_pair_nd(s, a, t, b, spec, psi, n, rel_tol, rho)


def _product_factorized(s, a, t, b, m, factors, n, rel_tol):
    value, rel_err, absv, rho = s.coeff * t.coeff, 0.0, abs(s.coeff * t.coeff), 0.0
    for j, psi_j in enumerate(factors):
        r_j, res = _delta_pair_1d(m, s.order[j], a, s.point[j], t.order[j], b, t.point[j],
                                  psi_j, n, rel_tol)
        scale = float(n) ** r_j
        v = scale * res.value
        value *= v
        absv *= scale * res.abs_value
        rel_err += res.error_estimate / max(abs(res.value), 1e-300)
        rho += r_j
    return _Part(value, abs(value) * rel_err, absv, rho)


def _delta_pair_nd(s, a, t, b, spec, psi, n, rel_tol, rho):
    m, d = spec.m, spec.d
    na = float(n) ** a
    tt = float(n) ** (b - a)
    x0 = np.asarray(s.point)
    c = float(n) ** b * (x0 - np.asarray(t.point))

    if spec.kind is Kind.PRODUCT:
        def f(*u):
            out = psi(*(x0[j] + u[j] / na for j in range(d)))
            for j in range(d):
                out = out * phi(m, s.order[j], u[j]) * phi(m, t.order[j], tt * u[j] + c[j])
            return out
    else:
        def f(*u):
            r0 = np.sqrt(sum(uj * uj for uj in u))
            r1 = np.sqrt(sum((tt * u[j] + c[j]) ** 2 for j in range(d)))
            return (radial_phi(m, d, r0) * radial_phi(m, d, r1)
                    * psi(*(x0[j] + u[j] / na for j in range(d))))

    pts = tuple((0.0, (1.0 - c[j]) / tt, (-1.0 - c[j]) / tt, *_psi_edges(psi, na, x0[j], j))
                for j in range(d))
    req = QuadRequest(f, ((-1.0, 1.0),) * d, rel_tol=rel_tol, abs_tol=1e-300,
                      points=pts, cancel_tol=CANCEL_TOL)
    res = _check(integrate_nd(req), f"a {d}-D delta pair")
    return _scaled(s.coeff * t.coeff, n, rho, res)


# -- terms with a continuous factor ------------------------------------------------

def _delta_continuous(s: DeltaDeriv, a, c: ContinuousTerm, b, spec, psi, n, rel_tol):
    """``int n^{a(k+1)} Phi^(k)(n^a(x-x0)) C_n^(b)(x) psi(x) dx`` over the delta's support."""
    m = spec.m
    (k,) = s.order
    (x0,) = s.point
    na = float(n) ** a
    field = mollified_continuous(c, spec, float(n) ** b, rel_tol=rel_tol / 10)
    lo, hi = field.support[0]
    if x0 + 1 / na <= lo or x0 - 1 / na >= hi:
        return _Part(0.0, 0.0, 0.0, a * k)
    wb = float(n) ** -b

    def f(u):
        x = x0 + u / na
        return phi(m, k, u) * field(x) * psi.value_at(x)

    pts = [0.0, *_psi_edges(psi, na, x0)]
    for kink in c.kinks:
        pts += [na * (kink - x0 + off) for off in (-wb, 0.0, wb)]
    res = quad(f, -1.0, 1.0, rel_tol=rel_tol, abs_tol=1e-300, points=pts, cancel_tol=CANCEL_TOL)
    return _scaled(s.coeff, n, a * k, _check(res, "a delta-continuous pair"))


def _continuous_pair(c1: ContinuousTerm, a, c2: ContinuousTerm, b, spec, psi, n, rel_tol):
    f1 = mollified_continuous(c1, spec, float(n) ** a, rel_tol=rel_tol / 10)
    f2 = mollified_continuous(c2, spec, float(n) ** b, rel_tol=rel_tol / 10)
    (p_lo, p_hi), = psi.support()
    lo = max(f1.support[0][0], f2.support[0][0], p_lo)
    hi = min(f1.support[0][1], f2.support[0][1], p_hi)
    if lo >= hi:
        return _ZERO
    pts = []
    for kinks, w in ((c1.kinks, float(n) ** -a), (c2.kinks, float(n) ** -b)):
        for kink in kinks:
            pts += [kink - w, kink, kink + w]
    res = quad(lambda x: f1(x) * f2(x) * psi.value_at(x), lo, hi, rel_tol=rel_tol,
               abs_tol=1e-300, points=pts, cancel_tol=CANCEL_TOL)
    return _scaled(1.0, n, 0.0, _check(res, "a continuous pair"))


def _term_pair(s, a, t, b, spec, psi, n, rel_tol):
    s_delta = isinstance(s, DeltaDeriv)
    t_delta = isinstance(t, DeltaDeriv)
    if s_delta and t_delta:
        return _delta_pair(s, a, t, b, spec, psi, n, rel_tol)
    if spec.d != 1:
        raise UsageError("continuous terms are one-dimensional only")
    if s_delta:
        return _delta_continuous(s, a, t, b, spec, psi, n, rel_tol)
    if t_delta:
        return _delta_continuous(t, b, s, a, spec, psi, n, rel_tol)
    return _continuous_pair(s, a, t, b, spec, psi, n, rel_tol)


def _bilinear(S, a, T, b, spec, psi, n, rel_tol):
    return _combine(_term_pair(s, a, t, b, spec, psi, n, rel_tol)
                    for s in S.terms for t in T.terms)


# -- Cauchy-regularised product ---------------------------------------------------

def _legacy_pair(s: DeltaDeriv, t: DeltaDeriv, alpha, beta, m, psi, n, rel_tol):
    """``int S_n^(beta)(x) T_red(x, n**-alpha) psi(x) dx`` for delta terms ``s`` (mollified) and ``t``."""
    (l,) = s.order
    (k,) = t.order
    (xs,) = s.point
    (xt,) = t.point
    nb = float(n) ** beta
    eta = float(n) ** (beta - alpha)
    c = nb * (xs - xt)
    rho = beta * (k + l + 1)

    def f(u):
        return phi(m, l, u) * cauchy_value(k, u + c, eta) * psi.value_at(xs + u / nb)

    pts = [0.0, -c, *_psi_edges(psi, nb, xs)]
    w = eta
    while w < 2.0:
        pts += [-c - w, -c + w]
        w *= 4.0
    res = quad(f, -1.0, 1.0, rel_tol=rel_tol, abs_tol=1e-300, points=pts, cancel_tol=CANCEL_TOL)
    return _scaled(s.coeff * t.coeff, n, rho, _check(res, "a Cauchy-regularised pair"))


def _legacy(q: ProductQuery, n):
    m = q.spec.m
    parts = []
    for s in q.S.terms:
        for t in q.T.terms:
            for p in (_legacy_pair(s, t, q.alpha, q.beta, m, q.psi, n, q.rel_tol),
                      _legacy_pair(t, s, q.alpha, q.beta, m, q.psi, n, q.rel_tol)):
                parts.append(_Part(0.5 * p.value, 0.5 * p.error, 0.5 * p.absv, p.exponent))
    return _combine(parts)


# -- public evaluators --------------------------------------------------------------

def _sample(n, part):
    return SequenceSample(int(n), part.value, part.error, part.exponent, part.absv)


def eval_product_at_n(q: ProductQuery, n: int) -> SequenceSample:
    if n < 1:
        raise UsageError("n must be >= 1")
    if q.kind is ProductKind.LEGACY:
        return _sample(n, _legacy(q, n))
    if q.kind is ProductKind.DIRECT:
        return _sample(n, _bilinear(q.S, q.alpha, q.T, q.beta, q.spec, q.psi, n, q.rel_tol))
    if q.kind is ProductKind.EXCHANGE:
        return _sample(n, _bilinear(q.S, q.beta, q.T, q.alpha, q.spec, q.psi, n, q.rel_tol))
    direct = _bilinear(q.S, q.alpha, q.T, q.beta, q.spec, q.psi, n, q.rel_tol)
    exchange = _bilinear(q.S, q.beta, q.T, q.alpha, q.spec, q.psi, n, q.rel_tol)
    return SequenceSample(int(n), 0.5 * (direct.value + exchange.value),
                          0.5 * (direct.error + exchange.error),
                          max(direct.exponent, exchange.exponent),
                          0.5 * (direct.absv + exchange.absv))


def naive_product_at_n(q: ProductQuery, n: int, rel_tol: float = 1e-12) -> float:
    """Un-rescaled quadrature in ``x`` of the 1-D product; a test oracle for ``n <= 16``.

    Builds the mollified fields with :func:`mollify` (and the Cauchy field
    for the legacy product) and integrates their product over the support
    of ``psi`` with no change of variables.
    """
    if n > 16:
        raise ValueError("the naive evaluation is only meant for n <= 16")
    if q.spec.d != 1:
        raise UsageError("naive oracle is one-dimensional")
    (lo, hi), = q.psi.support()
    points = []
    for term in q.S.terms + q.T.terms:
        p = term.point[0] if isinstance(term, DeltaDeriv) else 0.0
        points += [p + sgn * n ** -e for e in (q.alpha, q.beta) for sgn in (-1, 0, 1)]
        points += list(getattr(term, "kinks", ()))

    if q.kind is ProductKind.LEGACY:
        from .regularize import cauchy_reduce

        eps = float(n) ** -q.alpha

        def red(expr):
            fields = [(t.coeff, t.point[0], cauchy_reduce(t.order[0], eps)) for t in expr.terms]
            return lambda x: sum(c * fl(x - p) for c, p, fl in fields)

        s_n, t_n = mollify(q.S, q.spec, q.beta, n), mollify(q.T, q.spec, q.beta, n)
        s_red, t_red = red(q.S), red(q.T)

        def integrand(x):
            return 0.5 * (s_n(x) * t_red(x) + t_n(x) * s_red(x)) * q.psi.value_at(x)
    else:
        def pair(a, b):
            fa, fb = mollify(q.S, q.spec, a, n), mollify(q.T, q.spec, b, n)
            return lambda x: fa(x) * fb(x)

        direct = pair(q.alpha, q.beta)
        exchange = pair(q.beta, q.alpha)
        w = {ProductKind.DIRECT: (1.0, 0.0), ProductKind.EXCHANGE: (0.0, 1.0),
             ProductKind.SYM: (0.5, 0.5)}[q.kind]

        def integrand(x):
            out = 0.0
            if w[0]:
                out = out + w[0] * direct(x)
            if w[1]:
                out = out + w[1] * exchange(x)
            return out * q.psi.value_at(x)

    res = quad(integrand, lo, hi, rel_tol=rel_tol, abs_tol=1e-300, points=points,
               max_subdivisions=20000, cancel_tol=CANCEL_TOL)
    return res.value


def symmetry_check(q: ProductQuery, n: int) -> dict:
    """Residuals of the index-swap identities at one ``n``.

    ``direct_vs_exchange``: ``(S.d T)^(a,b) - (S.ex T)^(b,a)``;
    ``direct_swap`` / ``exchange_swap``: ``(S.d T)^(a,b) - (T.d S)^(b,a)`` and
    the same for the exchange product.
    """
    def ev(S, T, kind, a, b):
        return eval_product_at_n(ProductQuery(S, T, q.spec, kind, a, b, q.psi, q.rel_tol), n).value

    D, E = ProductKind.DIRECT, ProductKind.EXCHANGE
    a, b = q.alpha, q.beta
    d_ab = ev(q.S, q.T, D, a, b)
    e_ba = ev(q.S, q.T, E, b, a)
    d_ts = ev(q.T, q.S, D, b, a)
    e_ab = ev(q.S, q.T, E, a, b)
    e_ts = ev(q.T, q.S, E, b, a)
    return {
        "n": n,
        "direct": d_ab,
        "direct_vs_exchange": abs(d_ab - e_ba),
        "direct_swap": abs(d_ab - d_ts),
        "exchange_swap": abs(e_ab - e_ts),
    }


def continuous_product_check(S, T, spec, alpha, beta, psi, ns=(4, 8, 16, 32),
                             kind=ProductKind.SYM, rel_tol=1e-9) -> dict:
    """Product sequence of continuous terms against ``int S T psi``."""
    if not (S.continuous and T.continuous) or S.deltas or T.deltas:
        raise UsageError("continuous_product_check takes continuous terms only")
    q = ProductQuery(S, T, spec, kind, alpha, beta, psi, rel_tol)
    values = [eval_product_at_n(q, n).value for n in ns]

    def plain(expr):
        return lambda x: sum(t.coeff * t.func(x) for t in expr.terms)

    s_f, t_f = plain(S), plain(T)
    (lo, hi), = psi.support()
    kinks = [k for t in S.terms + T.terms for k in t.kinks]
    target = quad(lambda x: s_f(x) * t_f(x) * psi.value_at(x), lo, hi, rel_tol=1e-12,
                  abs_tol=1e-300, points=kinks).value
    deviations = [abs(v - target) for v in values]
    return {"n": list(ns), "values": values, "target": target, "deviations": deviations,
            "final_deviation": deviations[-1]}
