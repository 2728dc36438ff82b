import pytest

from distmul import constants
from distmul.distrib import Bump, delta
from distmul.errors import UnsupportedOrder
from distmul.limits import LimitClass, estimate_limit
from distmul.mollifier import Kind, MollifierSpec
from distmul.products import ProductQuery
from distmul.scanner import predict_critical, predicted_limit, ratio_grid, scan


@pytest.mark.parametrize("args,ratio,cid", [
    ((0, 0, 2), 1.5, "B"),
    ((0, 1, 4), 5 / 3, "K"),
    ((1, 1, 4), 2.5, "Btilde"),
    ((2, 1, 6), 7 / 3, "G(2,1)"),
    ((0, 0, 2, 2, "radial"), 2.0, "C"),
    ((0, 0, 4, 3, "radial"), 7 / 4, "C"),
    ((0, 0, 2, 2, "product"), 1.5, "Bd"),
])
def test_predict_critical(args, ratio, cid):
    p = predict_critical(*args)
    assert p.ratio == pytest.approx(ratio, rel=1e-15) and p.constant_id == cid


def test_predict_critical_rejects_low_order():
    with pytest.raises(UnsupportedOrder):
        predict_critical(1, 1, 2)
    with pytest.raises(UnsupportedOrder):
        predict_critical(1, 0, 2, 2, Kind.RADIAL)


def test_predicted_limit_values():
    q = ProductQuery(delta(1), delta(1), MollifierSpec(4), "sym", 2.5, 1.0, Bump())
    p = predicted_limit(q)
    assert p.cls is LimitClass.CONVERGENT
    assert p.value == pytest.approx(constants.Btilde(4).value)
    assert predicted_limit(q.with_exponents(3.0, 1.0)).cls is LimitClass.ZERO
    assert predicted_limit(q.with_exponents(2.0, 1.0)).cls is LimitClass.DIVERGENT


def test_ratio_grid_inserts_exact_ratio():
    g = ratio_grid(1.1, 2.0, 0.05, [5 / 3])
    assert 5 / 3 in g and len(g) == 19
    assert all(a < b for a, b in zip(g, g[1:]))
    g = ratio_grid(1.0, 1.2, 0.1, [1.5])
    assert 1.5 not in g


def _template(m=2, k=0):
    return ProductQuery(delta(k), delta(k), MollifierSpec(m), "sym", 1.0, 1.0, Bump())


def test_scan_finds_critical_ratio():
    rep = scan(_template(), (1.1, 2.0, 0.05))
    assert rep.predicted_ratio == 1.5
    assert len(rep.detected_critical) == 1
    assert abs(rep.detected_critical[0] - 1.5) <= 0.05
    assert rep.ordering_ok
    conv = [p for p in rep.points if p.ratio == 1.5][0]
    assert conv.verdict.value == pytest.approx(rep.predicted_constant, rel=1e-4)


def test_mirror_scan():
    rep = scan(_template(), (0.5, 0.91, 0.05))
    assert rep.predicted_ratio == pytest.approx(1 / 1.5)
    assert abs(rep.detected_critical[0] - 1 / 1.5) <= 0.05
    assert rep.ordering_ok


def test_scan_is_invariant_under_inversion():
    up = scan(_template(), (1.2, 2.0, 0.1))
    for p in up.points:
        mirror = estimate_limit(_template().with_exponents(1.0 / p.ratio, 1.0))
        assert mirror.cls is p.cls, p.ratio


def test_scan_marks_failures_inconclusive(monkeypatch):
    from distmul import scanner
    from distmul.errors import NumericalError

    def boom(*a, **k):
        raise NumericalError("no convergence")

    monkeypatch.setattr(scanner, "estimate_limit", boom)
    rep = scan(_template(), (1.4, 1.6, 0.1))
    assert all(p.cls is LimitClass.INCONCLUSIVE for p in rep.points)
    assert rep.summary()["failed_points"] == rep.ratio_grid
