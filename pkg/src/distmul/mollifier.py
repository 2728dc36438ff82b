"""The bump family ``x**m * exp(1/(x**2 - 1)) / N_m`` and its delta sequences.

Derivatives are closed form: ``Phi^(k)(x) = P_k(x) / (x**2 - 1)**(2k) *
exp(1/(x**2 - 1)) / N_m`` where the integer polynomials ``P_k`` follow from
``P_0 = x**m`` and

    P_{k+1} = P_k' (x**2 - 1)**2 - 4k x (x**2 - 1) P_k - 2x P_k.

Values are returned as exactly zero once ``1 - x**2 <= EDGE`` (about where
``exp(1/(x**2 - 1))`` leaves the normal binary64 range), which also keeps
the rational prefactor from overflowing for ``k <= MAX_ORDER``.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalError, UnsupportedOrder
from .quadrature import quad, sphere_area

__all__ = [
    "EDGE",
    "MAX_ORDER",
    "Kind",
    "MollifierSpec",
    "bump_moment",
    "delta_seq",
    "envelope",
    "eval_deriv",
    "normalize",
    "phi",
    "prefactor_poly",
    "radial_moment",
    "radial_phi",
]

EDGE = 1.4e-3
MAX_ORDER = 8
_MOMENT_RTOL = 1e-13


class Kind(enum.Enum):
    ONE_D = "1d"
    PRODUCT = "product"
    RADIAL = "radial"


@dataclass(frozen=True)
class MollifierSpec:
    """Order ``m`` (even, >= 2), kind and spatial dimension ``d``."""

    m: int = 2
    kind: Kind = Kind.ONE_D
    d: int = 1

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", Kind(self.kind))
        if int(self.m) != self.m or self.m < 2 or self.m % 2:
            raise UnsupportedOrder("m must be even and >= 2")
        if self.d < 1:
            raise ValueError("d must be >= 1")
        if (self.kind is Kind.ONE_D) != (self.d == 1):
            raise ValueError("kind '1d' is used exactly when d == 1")

    @property
    def norm(self) -> float:
        """N_m (per axis for product kind) or N'_m for the radial kind."""
        return normalize(self)


# -- exact prefactor polynomials ---------------------------------------------

@lru_cache(maxsize=None)
def prefactor_poly(m: int, k: int) -> tuple:
    """Integer coefficients (lowest degree first) of ``P_k`` for order ``m``."""
    if k < 0:
        raise UnsupportedOrder("derivative order must be >= 0")
    if k == 0:
        return (0,) * m + (1,)
    p = list(prefactor_poly(m, k - 1))
    j = k - 1
    out = [0] * (len(p) + 3)
    for i, c in enumerate(p):
        if c == 0:
            continue
        # P' (x^2-1)^2 = P' (x^4 - 2x^2 + 1)
        if i > 0:
            dc = i * c
            out[i - 1] += dc
            out[i + 1] -= 2 * dc
            out[i + 3] += dc
        # -4j x (x^2 - 1) P - 2x P
        out[i + 3] -= 4 * j * c
        out[i + 1] += 4 * j * c - 2 * c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


@lru_cache(maxsize=None)
def _poly_array(m, k):
    return np.array(prefactor_poly(m, k), dtype=float)


def envelope(x):
    """``exp(1/(x**2 - 1))`` inside the guarded support, 0 outside."""
    x = np.asarray(x, dtype=float)
    s = 1.0 - x * x
    out = np.zeros_like(x)
    inside = s > EDGE
    out[inside] = np.exp(-1.0 / s[inside])
    return out


def _unnormalized(m, k, x):
    x = np.asarray(x, dtype=float)
    s = 1.0 - x * x
    out = np.zeros_like(x)
    inside = s > EDGE
    xi = x[inside]
    si = s[inside]
    pk = np.polynomial.polynomial.polyval(xi, _poly_array(m, k))
    # (x^2 - 1)^(2k) == s^(2k)
    out[inside] = pk / si ** (2 * k) * np.exp(-1.0 / si)
    return out


# -- normalisation ------------------------------------------------------------

_norm_lock = threading.Lock()
_norm_cache: dict = {}


def _once(key, compute):
    try:
        return _norm_cache[key]
    except KeyError:
        pass
    with _norm_lock:
        if key not in _norm_cache:
            _norm_cache[key] = compute()
        return _norm_cache[key]


def bump_moment(j: int) -> float:
    """``N_j = int_{-1}^{1} x**j exp(1/(x**2-1)) dx`` (zero for odd ``j``)."""
    if j % 2:
        return 0.0

    def compute():
        res = quad(lambda x: x ** j * envelope(x), -1.0, 1.0, rel_tol=_MOMENT_RTOL, abs_tol=1e-300)
        if not res.converged:
            raise NumericalError(f"moment N_{j} did not converge", res.value, res.error_estimate)
        return res.value

    return _once(("N", j), compute)


def radial_moment(j: int, d: int) -> float:
    """``int_{|x|<1} |x|**j exp(1/(|x|**2-1)) dx`` in ``R^d`` by radial reduction."""

    def compute():
        res = quad(lambda r: r ** (d - 1 + j) * envelope(r), 0.0, 1.0,
                   rel_tol=_MOMENT_RTOL, abs_tol=1e-300)
        if not res.converged:
            raise NumericalError(f"radial moment ({j}, d={d}) did not converge",
                                 res.value, res.error_estimate)
        return sphere_area(d) * res.value

    return _once(("R", j, d), compute)


def normalize(spec: MollifierSpec) -> float:
    if spec.kind is Kind.RADIAL:
        return radial_moment(spec.m, spec.d)
    return bump_moment(spec.m)


# -- evaluation ---------------------------------------------------------------

def phi(m: int, k: int, x):
    """Normalised 1-D ``Phi^(k)(x)`` for order ``m`` (vectorised)."""
    if not 0 <= k <= MAX_ORDER:
        raise UnsupportedOrder(f"derivative order {k} outside 0..{MAX_ORDER}")
    return _unnormalized(m, k, x) / bump_moment(m)


def radial_phi(m: int, d: int, r):
    """Radial mollifier as a function of the radius ``r = |x|``."""
    r = np.asarray(r, dtype=float)
    return r ** m * envelope(r) / radial_moment(m, d)


def eval_deriv(spec: MollifierSpec, k: int, x):
    """``Phi^(k)(x)``.

    For the product and radial kinds ``x`` has a trailing axis of length
    ``d`` and only ``k = 0`` is available here; per-axis derivatives of the
    product kind go through :func:`phi`.
    """
    if spec.kind is Kind.ONE_D:
        return phi(spec.m, k, x)
    if k != 0:
        raise UnsupportedOrder(f"{spec.kind.value} mollifier only evaluates k = 0 as a whole")
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != spec.d:
        raise ValueError(f"expected trailing axis of length {spec.d}")
    if spec.kind is Kind.PRODUCT:
        return np.prod(phi(spec.m, 0, x), axis=-1)
    return radial_phi(spec.m, spec.d, np.sqrt(np.sum(x * x, axis=-1)))


def delta_seq(spec: MollifierSpec, alpha: float, n: int, x):
    """``n**(d*alpha) * Phi(n**alpha * x)``."""
    if n < 1 or alpha <= 0:
        raise ValueError("need n >= 1 and alpha > 0")
    scale = float(n) ** alpha
    return scale ** spec.d * eval_deriv(spec, 0, scale * np.asarray(x, dtype=float))


def support_radius(alpha: float, n: int) -> float:
    return float(n) ** -alpha
