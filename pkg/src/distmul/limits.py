"""Limit estimation and classification of product sequences.

A sequence sampled on a geometric grid ``n_j = n0 * rho**j`` is classified
from its tail (the last ``window`` samples):

* ``Divergent`` if the least-squares slope of ``log|I|`` against ``log n``
  is at least ``slope``;
* ``Zero`` if the slope is at most ``-slope``, or every tail sample is an
  exact zero;
* ``Convergent`` if neither, and the three-point extrapolants
  ``I = L + c n**-p`` formed along the tail agree to ``cauchy`` (relative);
* ``Inconclusive`` otherwise.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .products import ProductQuery, SequenceSample, eval_product_at_n

__all__ = [
    "LimitClass",
    "LimitVerdict",
    "NGrid",
    "Prediction",
    "ToleranceSet",
    "classify",
    "estimate_limit",
    "extrapolate3",
    "sample_grid",
    "verdict_vs_prediction",
]

_EPS = np.finfo(float).eps


class LimitClass(enum.Enum):
    CONVERGENT = "Convergent"
    ZERO = "Zero"
    DIVERGENT = "Divergent"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class NGrid:
    n0: int = 2
    ratio: int = 2
    count: int = 14

    def __post_init__(self):
        if self.n0 < 1 or self.ratio < 2 or self.count < 1:
            raise ValueError("need n0 >= 1, ratio >= 2 and at least two grid points")

    @property
    def n_values(self):
        return [self.n0 * self.ratio ** j for j in range(self.count + 1)]


@dataclass(frozen=True)
class ToleranceSet:
    slope: float = 0.1
    cauchy: float = 1e-4
    window: int = 5
    zero: float = 1e-13

    def __post_init__(self):
        if self.slope <= 0 or self.cauchy <= 0 or self.zero <= 0 or self.window < 3:
            raise ValueError("tolerances must be positive and the window at least 3")


@dataclass
class LimitVerdict:
    cls: LimitClass
    slope: float
    samples: list = field(default_factory=list)
    value: float | None = None
    extrapolation_error: float | None = None
    exponent: float | None = None
    sign_changes: int = 0

    @property
    def growth_exponent(self):
        return self.exponent if self.cls is LimitClass.DIVERGENT else None

    @property
    def decay_exponent(self):
        return self.exponent if self.cls is LimitClass.ZERO else None

    def to_dict(self):
        out = {"class": self.cls.value, "slope": _finite(self.slope),
               "sign_changes": self.sign_changes}
        if self.cls is LimitClass.CONVERGENT:
            out["value"] = self.value
            out["extrapolation_error"] = self.extrapolation_error
        elif self.cls is LimitClass.ZERO:
            out["decay_exponent"] = _finite(self.exponent)
        elif self.cls is LimitClass.DIVERGENT:
            out["growth_exponent"] = self.exponent
        out["samples"] = [
            {"n": s.n, "value": s.value, "quad_error": s.quad_error,
             "rescale_exponent": s.rescale_exponent} for s in self.samples]
        return out


def _finite(x):
    if x is None or math.isfinite(x):
        return x
    return "-inf" if x < 0 else "inf"


def extrapolate3(i1, i2, i3):
    """Limit of ``L + c n**-p`` through three points on a geometric grid.

    Returns ``(L, ok)``; ``ok`` is False when the fit is ill-conditioned
    (non-monotone differences or ratio outside (0, 1)), in which case ``L``
    is just the last value.
    """
    d1 = i2 - i1
    d2 = i3 - i2
    if d2 == 0.0:
        return i3, True
    if d1 == 0.0:
        return i3, False
    q = d2 / d1
    if not 0.0 < q < 1.0 or not math.isfinite(q):
        return i3, False
    return i3 + d2 * q / (1.0 - q), True


def _slope(ns, values):
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.abs(np.asarray(values, dtype=float)))
    return float(np.polyfit(x, y, 1)[0])


def classify(samples, tol: ToleranceSet = ToleranceSet()) -> LimitVerdict:
    """Classify an already evaluated sequence (list of :class:`SequenceSample`)."""
    samples = list(samples)
    valid = [s for s in samples if math.isfinite(s.value)]
    if len(valid) < tol.window:
        return LimitVerdict(LimitClass.INCONCLUSIVE, math.nan, samples)
    tail = valid[-tol.window:]

    def is_zero(s):
        return abs(s.value) <= max(tol.zero, 64 * _EPS * s.abs_scale)

    nonzero = [s for s in tail if not is_zero(s)]
    signs = [np.sign(s.value) for s in nonzero]
    changes = int(sum(1 for u, v in zip(signs, signs[1:]) if u != v))
    if not nonzero:
        return LimitVerdict(LimitClass.ZERO, -math.inf, samples, exponent=-math.inf)
    if len(nonzero) < 3:
        return LimitVerdict(LimitClass.INCONCLUSIVE, math.nan, samples, sign_changes=changes)

    slope = _slope([s.n for s in nonzero], [s.value for s in nonzero])
    if slope >= tol.slope:
        return LimitVerdict(LimitClass.DIVERGENT, slope, samples, exponent=slope,
                            sign_changes=changes)
    if slope <= -tol.slope:
        return LimitVerdict(LimitClass.ZERO, slope, samples, exponent=slope,
                            sign_changes=changes)
    if len(nonzero) < len(tail):
        return LimitVerdict(LimitClass.INCONCLUSIVE, slope, samples, sign_changes=changes)

    vals = [s.value for s in tail]
    fits = [extrapolate3(*vals[j:j + 3]) for j in range(len(vals) - 2)]
    limits = [L for L, _ in fits]
    if all(ok for _, ok in fits[-2:]):
        value = limits[-1]
        error = abs(limits[-1] - limits[-2])
        diffs = [abs(u - v) / max(abs(v), tol.zero) for u, v in zip(limits, limits[1:])]
    else:
        value = vals[-1]
        error = abs(vals[-1] - vals[-2])
        diffs = [abs(u - v) / max(abs(v), tol.zero) for u, v in zip(vals, vals[1:])]
    if max(diffs) <= tol.cauchy:
        return LimitVerdict(LimitClass.CONVERGENT, slope, samples, value=value,
                            extrapolation_error=error, sign_changes=changes)
    return LimitVerdict(LimitClass.INCONCLUSIVE, slope, samples, sign_changes=changes)


def _eval(args):
    q, n = args
    return eval_product_at_n(q, n)


def sample_grid(q: ProductQuery, grid: NGrid = NGrid(), workers: int = 1):
    """Evaluate the product on every grid point, in grid order."""
    jobs = [(q, n) for n in grid.n_values]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_eval, jobs))
    return [_eval(j) for j in jobs]


def estimate_limit(q: ProductQuery, grid: NGrid = NGrid(), tol: ToleranceSet = ToleranceSet(),
                   workers: int = 1) -> LimitVerdict:
    return classify(sample_grid(q, grid, workers), tol)


@dataclass(frozen=True)
class Prediction:
    cls: LimitClass
    value: float | None = None
    source: str = ""


def verdict_vs_prediction(verdict: LimitVerdict, predicted: Prediction) -> dict:
    """Pass iff the classes agree and a convergent value is within
    ``max(1e-4 |predicted|, 1e-8)`` of the prediction."""
    ok = verdict.cls is predicted.cls
    deviation = None
    if ok and predicted.cls is LimitClass.CONVERGENT:
        deviation = abs(verdict.value - predicted.value)
        ok = deviation <= max(1e-4 * abs(predicted.value), 1e-8)
    return {"pass": bool(ok), "measured_class": verdict.cls.value,
            "predicted_class": predicted.cls.value, "measured_value": verdict.value,
            "predicted_value": predicted.value, "deviation": deviation,
            "source": predicted.source}
