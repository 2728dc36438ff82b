"""Sweeps over the exponent ratio ``r = alpha / beta`` with ``beta = 1``.

For two delta derivatives of orders ``k`` (narrow) and ``l`` (wide) the
rescaled product behaves like ``n**((m+1) - r (m-k-l))`` times a constant,
so the critical ratio is ``(m+1)/(m-k-l)`` in one dimension.  The product
mollifier repeats the 1-D picture per axis (``(m+1)/m``); the radial one
gives ``(m+d)/m``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import constants
from .errors import DistmulError, UnsupportedOrder, UsageError
from .limits import LimitClass, LimitVerdict, NGrid, Prediction, ToleranceSet, estimate_limit
from .mollifier import Kind
from .products import ProductKind, ProductQuery

__all__ = [
    "CriticalPrediction",
    "ScanReport",
    "predict_critical",
    "predicted_limit",
    "ratio_grid",
    "scan",
]


@dataclass(frozen=True)
class CriticalPrediction:
    ratio: float
    constant_id: str
    exact: Fraction


def predict_critical(k: int, l: int, m: int, d: int = 1, kind="1d") -> CriticalPrediction:
    """Closed-form critical ratio for ``delta^(k)`` times ``delta^(l)``."""
    kind = Kind(kind) if isinstance(kind, str) else kind
    if m < 2 or m % 2:
        raise UnsupportedOrder("m must be even and >= 2")
    if k < 0 or l < 0 or m <= k + l:
        raise UnsupportedOrder(f"the critical ratio needs m > k + l (k={k}, l={l}, m={m})")
    if kind is Kind.ONE_D:
        r = Fraction(m + 1, m - k - l)
        cid = {(0, 0): "B", (0, 1): "K", (1, 1): "Btilde"}.get((k, l), f"G({k},{l})")
    elif k or l:
        raise UnsupportedOrder(f"{kind.value} mollifier predictions are for delta times delta only")
    elif kind is Kind.PRODUCT:
        r = Fraction(m + 1, m)
        cid = "Bd"
    else:
        r = Fraction(m + d, m)
        cid = "C"
    return CriticalPrediction(float(r), cid, r)


def _single_delta(expr):
    if len(expr.terms) != 1 or not expr.delta_only:
        return None
    return expr.terms[0]


def predicted_limit(q: ProductQuery) -> Prediction:
    """Predicted verdict for a single-term delta product (DIRECT or SYM, centred test function)."""
    s, t = _single_delta(q.S), _single_delta(q.T)
    if s is None or t is None or s.point != t.point:
        raise UsageError("predictions need one delta term on each side at the same point")
    if q.kind not in (ProductKind.DIRECT, ProductKind.SYM, ProductKind.EXCHANGE):
        raise UsageError("predictions cover the direct, exchange and symmetric products")
    spec = q.spec
    psi0 = float(q.psi(*s.point))
    coeff = s.coeff * t.coeff

    def one(a, b, s, t):
        # s carries exponent a and t exponent b
        if a < b:
            a, b, s, t = b, a, t, s
        k, l = s.total_order, t.total_order
        if spec.kind is not Kind.ONE_D and (k or l):
            raise UsageError("d-D predictions are for delta times delta only")
        p = predict_critical(k, l, spec.m, spec.d, spec.kind)
        if a == b:
            return LimitClass.DIVERGENT, None, p
        if math.isclose(a / b, p.ratio, rel_tol=1e-12):
            if spec.kind is Kind.ONE_D:
                const = constants.G(k, l, spec.m).value
            else:
                const = constants.compute(spec.m, spec.d, p.constant_id).value
            return LimitClass.CONVERGENT, const, p
        return (LimitClass.ZERO if a / b > p.ratio else LimitClass.DIVERGENT), 0.0, p

    a, b = q.alpha, q.beta
    if q.kind is ProductKind.DIRECT:
        parts = [one(a, b, s, t)]
    elif q.kind is ProductKind.EXCHANGE:
        parts = [one(b, a, s, t)]
    else:
        parts = [one(a, b, s, t), one(b, a, s, t)]
    classes = {c for c, _, _ in parts}
    source = ", ".join(sorted({p.constant_id for _, _, p in parts}))
    if LimitClass.DIVERGENT in classes:
        return Prediction(LimitClass.DIVERGENT, None, source)
    if LimitClass.CONVERGENT in classes:
        w = 1.0 / len(parts)
        value = coeff * psi0 * sum(w * v for c, v, _ in parts if c is LimitClass.CONVERGENT)
        if value == 0.0:
            return Prediction(LimitClass.ZERO, None, source)
        return Prediction(LimitClass.CONVERGENT, value, source)
    return Prediction(LimitClass.ZERO, None, source)


def ratio_grid(lo: float, hi: float, step: float, insert=()):
    """``lo, lo+step, ... <= hi``; each ratio in ``insert`` replaces the nearest
    grid point within half a step (or is added when none is that close)."""
    if not (0 < lo <= hi) or step <= 0:
        raise UsageError("ratio range must satisfy 0 < lo <= hi and step > 0")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    grid = [round(lo + j * step, 12) for j in range(count)]
    for r in insert:
        if not lo - step / 2 <= r <= hi + step / 2:
            continue
        j = int(np.argmin([abs(g - r) for g in grid]))
        if abs(grid[j] - r) <= step / 2 + 1e-12:
            grid[j] = r
        else:
            grid.append(r)
    return sorted(set(grid))


@dataclass
class ScanPoint:
    ratio: float
    verdict: LimitVerdict | None
    error: str | None = None

    @property
    def cls(self):
        return self.verdict.cls if self.verdict is not None else LimitClass.INCONCLUSIVE

    def to_dict(self):
        v = self.verdict
        return {"r": self.ratio, "class": self.cls.value,
                "value": v.value if v is not None else None,
                "slope": v.slope if v is not None and math.isfinite(v.slope) else
                (None if v is None or math.isnan(v.slope) else ("-inf" if v.slope < 0 else "inf")),
                "error": self.error}


@dataclass
class ScanReport:
    ratio_grid: list
    points: list = field(default_factory=list)
    detected_critical: list = field(default_factory=list)
    predicted_ratio: float | None = None
    predicted_constant: float | None = None
    constant_id: str | None = None
    ordering_ok: bool | None = None

    @property
    def verdicts(self):
        return [p.cls for p in self.points]

    def summary(self):
        return {"detected_critical": self.detected_critical,
                "predicted_ratio": self.predicted_ratio,
                "predicted_constant": self.predicted_constant,
                "constant_id": self.constant_id,
                "ordering_ok": self.ordering_ok,
                "failed_points": [p.ratio for p in self.points if p.error]}

    def to_dict(self):
        out = self.summary()
        out["points"] = [p.to_dict() for p in self.points]
        return out


def _point(args):
    template, r, grid, tol = args
    try:
        return ScanPoint(r, estimate_limit(template.with_exponents(r, 1.0), grid, tol))
    except DistmulError as exc:
        return ScanPoint(r, None, str(exc))


def detect_critical(points):
    """Ratios at which the class flips between Divergent and {Zero, Convergent}.

    Inconclusive points are skipped; the reported ratio is the first point on
    the non-divergent side of the flip.
    """
    decided = [p for p in points if p.cls is not LimitClass.INCONCLUSIVE]
    out = []
    for p, q in zip(decided, decided[1:]):
        a, b = p.cls is LimitClass.DIVERGENT, q.cls is LimitClass.DIVERGENT
        if a != b:
            out.append(q.ratio if a else p.ratio)
    return out


def _ordering_ok(points, r_star):
    """Below ``r_star`` (in the direction away from the mirror) only Divergent,
    at ``r_star`` Convergent, beyond it only Zero.  Works for either side of 1."""
    ok = True
    for p in points:
        if p.cls is LimitClass.INCONCLUSIVE:
            continue
        if math.isclose(p.ratio, r_star, rel_tol=1e-12):
            ok &= p.cls is LimitClass.CONVERGENT
        elif (p.ratio - r_star) * (r_star - 1) > 0:
            ok &= p.cls is LimitClass.ZERO
        elif (p.ratio - 1) * (r_star - 1) > 0:
            ok &= p.cls is LimitClass.DIVERGENT
    return bool(ok)


def scan(template: ProductQuery, r_range=(1.1, 2.0, 0.05), grid: NGrid = NGrid(),
         tol: ToleranceSet = ToleranceSet(), workers: int = 1) -> ScanReport:
    """Classify the product at every ratio of ``r_range = (lo, hi, step)``.

    When the template has a closed-form prediction, its critical ratio (and
    the mirror ratio ``1/r*`` for the symmetric product) is evaluated exactly
    in place of the nearest grid point.
    """
    lo, hi, step = r_range
    r_star, const, cid = None, None, None
    s, t = _single_delta(template.S), _single_delta(template.T)
    if s is not None and t is not None and template.kind is not ProductKind.LEGACY:
        k, l = sorted((s.total_order, t.total_order))
        try:
            p = predict_critical(k, l, template.spec.m, template.spec.d, template.spec.kind)
            r_star, cid = p.ratio, p.constant_id
        except UnsupportedOrder:
            pass
    inserts = []
    if r_star is not None:
        inserts = [r_star]
        if template.kind is ProductKind.SYM:
            inserts.append(1.0 / r_star)
    ratios = ratio_grid(lo, hi, step, inserts)
    jobs = [(template, r, grid, tol) for r in ratios]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            points = list(pool.map(_point, jobs))
    else:
        points = [_point(j) for j in jobs]

    report = ScanReport(ratios, points, detect_critical(points), None, None, cid)
    if r_star is not None:
        # the prediction is made on whichever side of 1 the scan covers
        target = r_star if hi > 1 else 1.0 / r_star
        if lo <= target <= hi:
            report.predicted_ratio = target
            try:
                report.predicted_constant = predicted_limit(template.with_exponents(target, 1.0)).value
            except (DistmulError, ValueError):
                report.predicted_constant = None
            report.ordering_ok = _ordering_ok(points, target)
    return report
