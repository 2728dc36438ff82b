"""Distribution expressions, test functions and their mollification.

A distribution here is a finite sum of weighted derivative-of-delta terms
and continuous compactly supported functions.  Points in ``R^d`` are
passed as arrays whose trailing axis has length ``d`` (plain arrays in 1-D).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import UnsupportedOrder, UsageError
from .mollifier import MAX_ORDER, Kind, MollifierSpec, phi, radial_phi
from .quadrature import quad

__all__ = [
    "Bump",
    "ContinuousTerm",
    "DeltaDeriv",
    "DistributionExpr",
    "Hat",
    "MollifiedField",
    "PolyBump",
    "ProductBump",
    "TestFunction",
    "VanishingAtOrigin",
    "delta",
    "derivative_at",
    "eval_test",
    "hat",
    "mollify",
]


# -- terms --------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaDeriv:
    """``coeff * D^order delta(x - point)``; ``order`` is a multi-index."""

    coeff: float
    order: tuple
    point: tuple

    @property
    def d(self):
        return len(self.point)

    @property
    def total_order(self):
        return sum(self.order)

    def shifted(self, offset):
        return replace(self, point=tuple(p + o for p, o in zip(self.point, offset)))


@dataclass(frozen=True)
class Hat:
    """Triangle on ``[a, b]`` peaking at 1 in the middle."""

    a: float
    b: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        mid = 0.5 * (self.a + self.b)
        half = 0.5 * (self.b - self.a)
        return np.clip(1.0 - np.abs(x - mid) / half, 0.0, None)

    @property
    def kinks(self):
        return (self.a, 0.5 * (self.a + self.b), self.b)

    def shifted(self, offset):
        return Hat(self.a + offset, self.b + offset)


@dataclass(frozen=True)
class ContinuousTerm:
    """``coeff * func(x)`` with ``func`` vanishing outside ``support``.

    Only one-dimensional continuous terms are supported.  ``kinks`` lists
    points where ``func`` is not smooth; quadrature splits there.
    """

    coeff: float
    func: Callable
    support: tuple
    kinks: tuple = ()

    @property
    def d(self):
        return 1

    def shifted(self, offset):
        (o,) = offset
        func = self.func.shifted(o) if hasattr(self.func, "shifted") else _Shift(self.func, o)
        return ContinuousTerm(self.coeff, func, (self.support[0] + o, self.support[1] + o),
                              tuple(k + o for k in self.kinks))


@dataclass(frozen=True)
class _Shift:
    func: Callable
    offset: float

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float) - self.offset)


@dataclass(frozen=True)
class DistributionExpr:
    d: int
    terms: tuple = field(default=())

    def __post_init__(self):
        for t in self.terms:
            if t.d != self.d:
                raise UsageError(f"term of dimension {t.d} in a {self.d}-D expression")
            if isinstance(t, DeltaDeriv):
                if len(t.order) != self.d or min(t.order) < 0:
                    raise UsageError(f"bad multi-index {t.order}")
                if max(t.order) > MAX_ORDER:
                    raise UnsupportedOrder(f"derivative order above {MAX_ORDER}")

    def __add__(self, other):
        if self.d != other.d:
            raise UsageError("dimension mismatch")
        return DistributionExpr(self.d, self.terms + other.terms)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __rmul__(self, a):
        return DistributionExpr(self.d, tuple(replace(t, coeff=a * t.coeff) for t in self.terms))

    def shifted(self, offset):
        offset = tuple(np.atleast_1d(offset).astype(float))
        return DistributionExpr(self.d, tuple(t.shifted(offset) for t in self.terms))

    @property
    def deltas(self):
        return [t for t in self.terms if isinstance(t, DeltaDeriv)]

    @property
    def continuous(self):
        return [t for t in self.terms if isinstance(t, ContinuousTerm)]

    @property
    def delta_only(self):
        return all(isinstance(t, DeltaDeriv) for t in self.terms)


def delta(k=0, x0=0.0, coeff=1.0, d=1):
    """``coeff * delta^(k)`` at ``x0``.  In d-D ``k`` may be a multi-index."""
    point = tuple(np.broadcast_to(np.asarray(x0, dtype=float), (d,)))
    order = (int(k),) + (0,) * (d - 1) if np.ndim(k) == 0 else tuple(int(i) for i in k)
    return DistributionExpr(d, (DeltaDeriv(float(coeff), order, point),))


def hat(a=-1.0, b=1.0, coeff=1.0):
    h = Hat(float(a), float(b))
    return DistributionExpr(1, (ContinuousTerm(float(coeff), h, (h.a, h.b), h.kinks),))


# -- test functions -------------------------------------------------------------

def _bump_profile(rho2):
    rho2 = np.asarray(rho2, dtype=float)
    s = 1.0 - rho2
    out = np.zeros_like(s)
    inside = s > 0
    with np.errstate(under="ignore"):
        out[inside] = np.exp(-1.0 / s[inside])
    return out


def _points(x, d):
    x = np.asarray(x, dtype=float)
    return x[..., None] if d == 1 else x


class TestFunction:
    """A smooth compactly supported function with closed-form values."""

    __test__ = False  # not a pytest class
    d: int

    def value_at(self, x):
        raise NotImplementedError

    def __call__(self, *coords):
        """Evaluate on separate coordinate arrays (integrand convention)."""
        if len(coords) == 1 and self.d == 1:
            return self.value_at(coords[0])
        return self.value_at(np.stack(np.broadcast_arrays(*coords), axis=-1))

    def support(self):
        raise NotImplementedError

    def shifted(self, offset):
        raise NotImplementedError

    def axis_factors(self):
        """Per-axis 1-D factors if the function is a product, else None."""
        return None

    def radial_about(self, point):
        """Radial profile ``f(r)`` about ``point`` if radially symmetric there, else None."""
        return None


@dataclass(frozen=True)
class Bump(TestFunction):
    """``scale * exp(-1 / (1 - |x - center|**2 / s**2))``; value at centre is ``scale/e``."""

    center: tuple = (0.0,)
    s: float = 1.0
    scale: float = math.e

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(np.atleast_1d(np.asarray(self.center, float))))
        if self.s <= 0:
            raise ValueError("halfwidth must be positive")

    @property
    def d(self):
        return len(self.center)

    def value_at(self, x):
        x = _points(x, self.d)
        rho2 = np.sum((x - np.asarray(self.center)) ** 2, axis=-1) / self.s ** 2
        return self.scale * _bump_profile(rho2)

    def support(self):
        return tuple((c - self.s, c + self.s) for c in self.center)

    def shifted(self, offset):
        return replace(self, center=tuple(np.asarray(self.center) + np.atleast_1d(offset)))

    def axis_factors(self):
        if self.d == 1:
            return (self,)
        return None

    def radial_about(self, point):
        if not np.allclose(point, self.center, rtol=0, atol=0):
            return None
        s, c = self.s, self.scale
        return lambda r: c * _bump_profile((np.asarray(r) / s) ** 2)


@dataclass(frozen=True)
class ProductBump(TestFunction):
    """Tensor product of 1-D bumps; value at centre is ``scale * e**-d``."""

    center: tuple = (0.0, 0.0)
    s: float = 1.0
    scale: float = math.e ** 2

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(np.atleast_1d(np.asarray(self.center, float))))

    @property
    def d(self):
        return len(self.center)

    def value_at(self, x):
        x = _points(x, self.d)
        u2 = ((x - np.asarray(self.center)) / self.s) ** 2
        return self.scale * np.prod(_bump_profile(u2), axis=-1)

    def support(self):
        return tuple((c - self.s, c + self.s) for c in self.center)

    def shifted(self, offset):
        return replace(self, center=tuple(np.asarray(self.center) + np.atleast_1d(offset)))

    def axis_factors(self):
        per_axis = self.scale ** (1.0 / self.d)
        return tuple(Bump((c,), self.s, per_axis) for c in self.center)


@dataclass(frozen=True)
class PolyBump(TestFunction):
    """``bump(x) * p(x_1)`` with ``p`` given by coefficients, lowest degree first."""

    bump: TestFunction = field(default_factory=Bump)
    coeffs: tuple = (0.0, 1.0)

    @property
    def d(self):
        return self.bump.d

    def value_at(self, x):
        pts = _points(x, self.d)
        return self.bump.value_at(x) * np.polynomial.polynomial.polyval(pts[..., 0], self.coeffs)

    def support(self):
        return self.bump.support()

    def shifted(self, offset):
        raise UsageError("a polynomial factor is not translation invariant")

    def axis_factors(self):
        f = self.bump.axis_factors()
        if f is None:
            return None
        return (PolyBump(f[0], self.coeffs),) + tuple(f[1:])


@dataclass(frozen=True)
class VanishingAtOrigin(TestFunction):
    """``bump(x) * x_axis**power``; zero at the origin for ``power >= 1``."""

    bump: TestFunction = field(default_factory=Bump)
    axis: int = 0
    power: int = 1

    def __post_init__(self):
        if self.power < 1:
            raise ValueError("power must be >= 1")

    @property
    def d(self):
        return self.bump.d

    def value_at(self, x):
        pts = _points(x, self.d)
        return self.bump.value_at(x) * pts[..., self.axis] ** self.power

    def support(self):
        return self.bump.support()

    def shifted(self, offset):
        raise UsageError("a monomial factor is not translation invariant")

    def axis_factors(self):
        f = self.bump.axis_factors()
        if f is None:
            return None
        f = list(f)
        f[self.axis] = VanishingAtOrigin(f[self.axis], 0, self.power)
        return tuple(f)


def eval_test(psi: TestFunction, x):
    return psi.value_at(x)


def derivative_at(psi: TestFunction, k: int, x0: float = 0.0) -> float:
    """``psi^(k)(x0)`` for a 1-D test function by Richardson-refined central differences."""
    if k == 0:
        return float(psi.value_at(np.array([x0]))[0])
    h = 1e-3 if k <= 2 else 2e-2
    i = np.arange(k + 1)
    weights = np.array([(-1) ** j * math.comb(k, j) for j in i], dtype=float)
    offsets = (k / 2.0 - i)

    def central(step):
        return float(np.dot(weights, psi.value_at(x0 + offsets * step))) / step ** k

    # error expansion in even powers of the step
    t = [central(h / 2 ** j) for j in range(3)]
    r1 = [(4 * t[j + 1] - t[j]) / 3 for j in range(2)]
    return (16 * r1[1] - r1[0]) / 15


# -- mollification ------------------------------------------------------------

@dataclass(frozen=True)
class MollifiedField:
    """A smooth field ``x -> (T * delta_n^(alpha))(x)`` with its support box."""

    func: Callable
    support: tuple

    def __call__(self, x):
        return self.func(x)


def _check_compatible(term, spec: MollifierSpec):
    if spec.d != term.d:
        raise UsageError(f"{term.d}-D term with a {spec.d}-D mollifier")
    if isinstance(term, DeltaDeriv):
        if spec.kind is Kind.RADIAL and term.total_order:
            raise UnsupportedOrder("radial mollifier only smooths underived deltas")
    elif spec.d != 1:
        raise UsageError("continuous terms are one-dimensional only")


def mollified_delta(term: DeltaDeriv, spec: MollifierSpec, scale: float):
    """Closed-form ``D^mu delta(. - x0) * delta_n`` with ``scale = n**alpha``."""
    _check_compatible(term, spec)
    x0 = np.asarray(term.point)
    c = term.coeff
    m, d = spec.m, spec.d
    pref = c * scale ** (d + term.total_order)

    if spec.kind is Kind.ONE_D:
        (k,) = term.order

        def f(x):
            return pref * phi(m, k, scale * (np.asarray(x, float) - x0[0]))
    elif spec.kind is Kind.PRODUCT:
        def f(x):
            u = scale * (_points(x, d) - x0)
            out = np.ones(u.shape[:-1])
            for j, mu in enumerate(term.order):
                out = out * phi(m, mu, u[..., j])
            return pref * out
    else:
        def f(x):
            u = scale * (_points(x, d) - x0)
            return pref * radial_phi(m, d, np.sqrt(np.sum(u * u, axis=-1)))

    r = 1.0 / scale
    return MollifiedField(f, tuple((p - r, p + r) for p in term.point))


def mollified_continuous(term: ContinuousTerm, spec: MollifierSpec, scale: float,
                         rel_tol: float = 1e-11):
    """Numerical ``C * delta_n``: ``int C(x - v/scale) Phi(v) dv`` pointwise."""
    _check_compatible(term, spec)
    m = spec.m
    func = term.func
    kinks = np.asarray(term.kinks, dtype=float)
    lo, hi = term.support

    def one(x):
        if x <= lo - 1.0 / scale or x >= hi + 1.0 / scale:
            return 0.0
        pts = scale * (x - kinks)
        res = quad(lambda v: func(x - v / scale) * phi(m, 0, v), -1.0, 1.0,
                   rel_tol=rel_tol, abs_tol=1e-15, points=pts)
        return res.value

    def f(x):
        x = np.asarray(x, dtype=float)
        flat = np.array([one(float(xi)) for xi in x.ravel()])
        return term.coeff * flat.reshape(x.shape)

    r = 1.0 / scale
    return MollifiedField(f, ((lo - r, hi + r),))


def mollify(T: DistributionExpr, spec: MollifierSpec, alpha: float, n: int) -> MollifiedField:
    """``T * delta_n^(alpha)`` as a callable with its support box."""
    if T.d != spec.d:
        raise UsageError("dimension mismatch between distribution and mollifier")
    scale = float(n) ** alpha
    fields = []
    for t in T.terms:
        if isinstance(t, DeltaDeriv):
            fields.append(mollified_delta(t, spec, scale))
        else:
            fields.append(mollified_continuous(t, spec, scale))
    if not fields:
        return MollifiedField(lambda x: np.zeros(np.shape(x)[: -1 if T.d > 1 else None]),
                              ((0.0, 0.0),) * T.d)

    def f(x):
        return sum(fl(x) for fl in fields)

    box = tuple((min(fl.support[j][0] for fl in fields), max(fl.support[j][1] for fl in fields))
                for j in range(T.d))
    return MollifiedField(f, box)
