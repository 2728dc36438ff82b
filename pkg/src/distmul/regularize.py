"""Cauchy (analytic) regularisation of delta derivatives.

For ``T = delta^(k)`` the boundary-value difference of the Cauchy transform
is, with ``theta = atan2(eps, x)`` and ``r = hypot(x, eps)``,

    T_red(x, eps) = (-1)**k * k! / pi * sin((k + 1) theta) / r**(k + 1),

which is the Poisson kernel ``eps / (pi (x**2 + eps**2))`` for ``k = 0`` and
its ``k``-th ``x`` derivative in general.  The field is homogeneous of
degree ``-(k + 1)`` in ``(x, eps)``; the product evaluator relies on that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedOrder
from .mollifier import MAX_ORDER

__all__ = ["CauchyField", "cauchy_reduce", "cauchy_value"]


def cauchy_value(k: int, x, eps: float):
    """Vectorised ``(delta^(k))_red(x, eps)``; odd/even in ``x`` exactly."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    theta = np.arctan2(eps, ax)
    r = np.hypot(ax, eps)
    val = (-1) ** k * math.factorial(k) / math.pi * np.sin((k + 1) * theta) / r ** (k + 1)
    if k % 2:
        # odd fields vanish at x = 0; sin((k+1) pi/2) alone leaves rounding residue
        val = np.where(x < 0, -val, np.where(x == 0, 0.0, val))
    return val


@dataclass(frozen=True)
class CauchyField:
    k: int
    epsilon: float

    def __call__(self, x):
        return cauchy_value(self.k, x, self.epsilon)

    value = __call__


def cauchy_reduce(k: int, epsilon: float) -> CauchyField:
    if not 0 <= k <= MAX_ORDER:
        raise UnsupportedOrder(f"derivative order {k} outside 0..{MAX_ORDER}")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return CauchyField(int(k), float(epsilon))
