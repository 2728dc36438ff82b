"""Quadrature oracle for the limit constants of the bump family.

Every constant is computed from its defining integral of ``Phi`` (or its
derivatives) and, independently, from moment identities in terms of the
raw moments ``N_j = int x**j exp(1/(x**2-1)) dx``:

    A_j     = N_{m-j} / N_m
    B_m     = N_{2m} / (e N_m**2)
    Btil_m  = -m (m-1) N_{2m-2} / (e N_m**2)
    G(k,l)  = m!/((m-l)! N_m e) int u**(m-l) Phi^(k)(u) du   (0 when k+l is odd)

``G(0,0) = B_m``, ``G(0,1) = K_m`` and ``G(1,1) = Btil_m``.  The radial
constant uses ``|x|**m``; the variant with ``|x|**1`` is kept under the name
``C1`` for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError, UnsupportedOrder
from .mollifier import MAX_ORDER, bump_moment, phi, radial_moment, radial_phi
from .quadrature import integrate_radial, quad

__all__ = [
    "ConstantTable",
    "Value",
    "compute",
    "constant_table",
    "identity_suite",
    "legacy_constant",
]

RTOL = 1e-11
E = math.e


@dataclass(frozen=True)
class Value:
    value: float
    error: float


def _check_m(m):
    if int(m) != m or m < 2 or m % 2:
        raise UnsupportedOrder("m must be even and >= 2")


def _q(f, a=-1.0, b=1.0, what="constant"):
    res = quad(f, a, b, rel_tol=RTOL, abs_tol=1e-300, points=(0.0,), cancel_tol=1e-13)
    if not res.converged:
        raise NumericalError(f"{what} did not converge", res.value, res.error_estimate)
    return res


def moment(j: int) -> Value:
    """``N_j`` (raw moment of ``exp(1/(x**2-1))``)."""
    return Value(bump_moment(j), 0.0 if j % 2 else 1e-13 * bump_moment(j))


def A(j: int, m: int) -> Value:
    """``int Phi(x) / x**j dx`` for even ``j <= m``."""
    _check_m(m)
    if j % 2 or j > m or j < 0:
        raise UnsupportedOrder(f"A_j needs even j <= m (got j={j}, m={m})")
    res = _q(lambda x: phi(m, 0, x) / x ** j, what=f"A_{j}")
    return Value(res.value, res.error_estimate)


def G(k: int, l: int, m: int) -> Value:
    """Leading limit constant for a delta^(k) (narrow) times delta^(l) (wide) product."""
    _check_m(m)
    if k < 0 or l < 0 or k + l >= m or k > MAX_ORDER:
        raise UnsupportedOrder(f"G needs k + l < m and k <= {MAX_ORDER} (k={k}, l={l}, m={m})")
    return _g(k, l, m)


def _g(k, l, m):
    pref = math.factorial(m) / (math.factorial(m - l) * bump_moment(m) * E)
    res = _q(lambda u: u ** (m - l) * phi(m, k, u), what=f"G({k},{l})")
    return Value(pref * res.value, abs(pref) * res.error_estimate)


def B(m: int) -> Value:
    return G(0, 0, m)


def K(m: int) -> Value:
    return G(0, 1, m)


def Btilde(m: int) -> Value:
    # defined for every even m, although the critical ratio needs m >= 4
    _check_m(m)
    return _g(1, 1, m)


def Bd(m: int, d: int) -> Value:
    """Product-mollifier constant ``B_m**d``."""
    b = B(m)
    return Value(b.value ** d, d * b.value ** (d - 1) * b.error)


def N_radial(m: int, d: int) -> Value:
    v = radial_moment(m, d)
    return Value(v, 1e-13 * v)


def C(m: int, d: int, power: int | None = None) -> Value:
    """``(1/(N'_m e)) int |x|**power Phi(x) dx`` over ``R^d``; ``power`` defaults to ``m``."""
    _check_m(m)
    p = m if power is None else power
    pref = 1.0 / (radial_moment(m, d) * E)
    res = integrate_radial(lambda r: r ** p * radial_phi(m, d, r), d, rel_tol=RTOL, abs_tol=1e-300)
    if not res.converged:
        raise NumericalError("C_m did not converge", res.value, res.error_estimate)
    return Value(pref * res.value, pref * res.error_estimate)


def legacy_constant(k: int, l: int, m: int) -> Value:
    """Limit of the Cauchy-regularised ``delta^(k) x delta^(l)`` product at ``alpha = (k+l+2) beta``.

    ``((-1)**k + (-1)**l) / 2 * (k+l+1)! / pi * A_{k+l+2}``; zero when ``k+l`` is odd.
    """
    j = k + l + 2
    if j > m:
        raise UnsupportedOrder(f"needs m >= k + l + 2 (k={k}, l={l}, m={m})")
    sign = 0.5 * ((-1) ** k + (-1) ** l)
    if sign == 0:
        return Value(0.0, 0.0)
    a = A(j, m)
    f = sign * math.factorial(k + l + 1) / math.pi
    return Value(f * a.value, abs(f) * a.error)


_NAMED = {
    "N": lambda m, d, p: moment(p.get("j", m)),
    "A": lambda m, d, p: A(p["j"], m),
    "B": lambda m, d, p: B(m),
    "K": lambda m, d, p: K(m),
    "Btilde": lambda m, d, p: Btilde(m),
    "G": lambda m, d, p: G(p["k"], p["l"], m),
    "Bd": lambda m, d, p: Bd(m, d),
    "Nprime": lambda m, d, p: N_radial(m, d),
    "C": lambda m, d, p: C(m, d),
    "C1": lambda m, d, p: C(m, d, power=1),
    "legacy": lambda m, d, p: legacy_constant(p["k"], p["l"], m),
}


def compute(m: int, d: int, which: str, **params) -> Value:
    """Look a constant up by name (see ``_NAMED``)."""
    _check_m(m)
    try:
        fn = _NAMED[which]
    except KeyError:
        raise ValueError(f"unknown constant {which!r}") from None
    return fn(m, d, params)


@dataclass
class ConstantTable:
    m: int
    d: int
    entries: dict = field(default_factory=dict)

    def to_dict(self):
        return {"m": self.m, "d": self.d,
                "entries": {k: {"value": v.value, "error": v.error}
                            for k, v in self.entries.items()}}


def constant_table(m: int, d: int = 2) -> ConstantTable:
    """Every constant available for order ``m`` (radial ones in dimension ``d``)."""
    _check_m(m)
    t = ConstantTable(m, d)
    t.entries["N_m"] = moment(m)
    for j in range(2, m + 1, 2):
        t.entries[f"A_{j}"] = A(j, m)
    t.entries["B_m"] = B(m)
    t.entries["K_m"] = K(m)
    t.entries["Btilde_m"] = Btilde(m)
    for k in range(min(m, 3)):
        for l in range(min(m - k, 3)):
            t.entries[f"G({k},{l})"] = G(k, l, m)
    t.entries[f"B_m^{d}"] = Bd(m, d)
    t.entries[f"Nprime_m(d={d})"] = N_radial(m, d)
    t.entries[f"C_m(d={d})"] = C(m, d)
    t.entries[f"C_m(d={d},|x|^1)"] = C(m, d, power=1)
    return t


def identity_suite(m: int, tol: float = 1e-8, d: int = 2) -> dict:
    """Cross-check each constant against its moment identity."""
    _check_m(m)
    Nm = bump_moment(m)
    checks = []

    def rel(a, b):
        return abs(a - b) / max(abs(b), 1e-300)

    for j in range(2, m + 1, 2):
        lhs = A(j, m).value
        rhs = bump_moment(m - j) / Nm
        checks.append({"identity": f"A_{j} = N_{m - j}/N_m", "residual": rel(lhs, rhs)})
    checks.append({"identity": "B_m = N_2m/(e N_m^2)",
                   "residual": rel(B(m).value, bump_moment(2 * m) / (E * Nm ** 2))})
    bt = Btilde(m).value
    checks.append({"identity": "Btilde_m = -m(m-1) N_{2m-2}/(e N_m^2)",
                   "residual": rel(bt, -m * (m - 1) * bump_moment(2 * m - 2) / (E * Nm ** 2))})
    checks.append({"identity": "Btilde_m < 0", "residual": 0.0 if bt < 0 else math.inf})
    scale = B(m).value
    for k in range(min(m, 4)):
        for l in range(m - k):
            if (k + l) % 2 and l < 4:
                g = G(k, l, m).value
                checks.append({"identity": f"G({k},{l}) = 0 (parity)",
                               "residual": abs(g) / scale})
    cm = C(m, d).value
    checks.append({"identity": f"C_m(d={d}) > 0", "residual": 0.0 if cm > 0 else math.inf})
    checks.append({"identity": f"C_m(d={d}) = N'_2m/(e N'_m^2)",
                   "residual": rel(cm, radial_moment(2 * m, d) / (E * radial_moment(m, d) ** 2))})
    for c in checks:
        c["pass"] = bool(np.isfinite(c["residual"]) and c["residual"] <= tol)
    return {"m": m, "tol": tol, "checks": checks, "pass": all(c["pass"] for c in checks)}
