import io
import json
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from distmul import cli
from distmul.cli import RunConfig, config_from_text, parse_args, parse_expr, parse_psi, run
from distmul.errors import NumericalError, UsageError


def _run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(parse_args(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_sequence_config_is_valid():
    cfg = parse_args("sequence --S delta --T delta --m 2 --alpha 1.5 --beta 1 --psi bump "
                     "--ngrid 2:2:14".split())
    assert cfg.command == "sequence" and cfg.ngrid == (2, 2, 14) and cfg.alpha == 1.5


def test_scan_config_is_valid():
    cfg = parse_args("scan --ratio 1.1:2.0:0.05 --S delta --T delta --m 2".split())
    assert cfg.ratio == (1.1, 2.0, 0.05)


def test_odd_m_exits_2():
    proc = subprocess.run([sys.executable, "-m", "distmul.cli", "limit", "--m", "3", "--alpha",
                           "1"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert "m must be even and ≥ 2" in proc.stderr and "--m" in proc.stderr


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        parse_args(["limit", "--frobnicate", "1"])
    assert exc.value.code == 2


@pytest.mark.parametrize("argv,flag", [
    ("limit --alpha 1 --S delta^9", "--S"),
    ("limit --alpha 1 --T delta+", "--T"),
    ("limit --alpha 1 --psi wedge", "--psi"),
    ("limit --alpha 1 --d 2", "--kind"),
    ("limit --alpha -1", "--alpha"),
    ("limit", "--alpha"),
    ("scan --ratio 2:1:0.1", "--ratio"),
    ("limit --alpha 1 --ngrid 2:2:2", "--ngrid"),
])
def test_usage_errors_name_the_flag(argv, flag):
    with pytest.raises(UsageError, match=flag):
        parse_args(argv.split())


def test_expression_grammar():
    e = parse_expr("2*delta' - 0.5*delta^3@0.25 + hat@[-1,1]")
    assert [t.coeff for t in e.terms] == [2.0, -0.5, 1.0]
    assert e.terms[1].order == (3,) and e.terms[1].point == (0.25,)
    e2 = parse_expr("delta^[1,0]@[0.1,0.2]", d=2)
    assert e2.terms[0].order == (1, 0) and e2.terms[0].point == (0.1, 0.2)
    for bad in ("delta'^2", "deltaa", "delta delta", "hat@[1,0]", ""):
        with pytest.raises(UsageError):
            parse_expr(bad)


def test_psi_grammar():
    assert parse_psi("bump")(0.0) == pytest.approx(1.0)
    assert parse_psi("bump[0.2,0.5]")(0.2) == pytest.approx(1.0)
    assert parse_psi("pbump", 2)(0.0, 0.0) == pytest.approx(1.0)
    assert parse_psi("vanish[2]")(0.0) == 0.0
    assert parse_psi("polybump[1,1]")(0.0) == pytest.approx(1.0)
    with pytest.raises(UsageError):
        parse_psi("bump[1,2,3]")


def test_limit_json():
    code, out, _ = _run("limit --S delta --T delta --m 2 --alpha 1.5 --beta 1".split())
    d = json.loads(out)
    assert code == 0 and d["class"] == "Convergent"
    assert d["value"] == pytest.approx(1.7559688202583625, rel=1e-4)
    assert d["prediction"]["pass"]
    code, out, _ = _run("limit --m 2 --alpha 1 --beta 1".split())
    d = json.loads(out)
    assert d["class"] == "Divergent" and d["growth_exponent"] == pytest.approx(1.0, abs=0.1)


def test_sequence_csv_has_17_digits():
    code, out, _ = _run("sequence --m 2 --alpha 1.5 --ngrid 2:2:4".split())
    lines = out.strip().splitlines()
    assert lines[0] == "n,value,quad_error,rescale_exponent"
    assert len(lines) == 6
    assert lines[1].split(",")[1] == format(float(lines[1].split(",")[1]), ".17g")


def test_scan_emits_csv_and_summary(tmp_path):
    path = tmp_path / "scan.csv"
    code, out, _ = _run(["scan", "--ratio", "1.4:1.6:0.1", "--output", str(path)])
    assert code == 0 and out == ""
    rows = path.read_text().splitlines()
    assert rows[0] == "r,class,value,slope" and len(rows) == 4
    summary = json.loads((tmp_path / "scan.csv.summary.json").read_text())
    assert summary["predicted_ratio"] == 1.5 and summary["detected_critical"] == [1.5]


def test_constants_and_legacy():
    code, out, _ = _run("constants --m 2".split())
    assert code == 0 and json.loads(out)["entries"]["B_m"]["value"] > 0
    code, out, _ = _run("legacy --m 2 --alpha 2".split())
    assert json.loads(out)["class"] == "Convergent"


def test_numerical_failure_gives_json_error(monkeypatch):
    def boom(*a, **k):
        raise NumericalError("quadrature stalled", 1.0, 0.5)

    monkeypatch.setattr(cli, "estimate_limit", boom)
    code, out, _ = _run("limit --alpha 1.5".split())
    assert code == 1
    assert json.loads(out)["error"]["message"] == "quadrature stalled"


def test_output_is_deterministic():
    argv = "limit --S delta+delta'@0.1 --T delta'' --m 4 --alpha 2.2 --psi bump[0.1,1.2]".split()
    assert _run(argv)[1] == _run(argv)[1]


def test_config_file(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text("# a limit run\ncommand=limit\nm=4\nalpha=2.5\nS=delta'\nT=delta'\n")
    cfg = parse_args(["--config", str(f), "--beta", "1.0"])
    assert cfg.m == 4 and cfg.S == "delta'" and cfg.alpha == 2.5
    cfg = parse_args(["--config", str(f), "--m", "6"])
    assert cfg.m == 6
    f.write_text("colour=blue\n")
    with pytest.raises(UsageError, match="colour"):
        parse_args(["limit", "--config", str(f)])


@settings(max_examples=60, deadline=None)
@given(command=st.sampled_from(cli.COMMANDS), m=st.sampled_from([2, 4, 6]),
       alpha=st.floats(0.01, 10), beta=st.floats(0.01, 10),
       ngrid=st.tuples(st.integers(1, 5), st.integers(2, 4), st.integers(5, 20)),
       ratio=st.none() | st.tuples(st.floats(0.1, 1), st.floats(1, 3), st.floats(0.01, 0.5)),
       tau=st.floats(0.01, 0.5), criteria=st.none() | st.lists(st.integers(1, 10), min_size=1,
                                                                  max_size=4).map(tuple),
       S=st.sampled_from(["delta", "delta'", "2*delta^2@0.5-hat@[-1,1]"]))
def test_config_round_trip(command, m, alpha, beta, ngrid, ratio, tau, criteria, S):
    cfg = RunConfig(command, S=S, m=m, alpha=alpha, beta=beta, ngrid=ngrid, ratio=ratio,
                    tau_slope=tau, criteria=criteria)
    assert RunConfig(**config_from_text(cfg.to_text())) == cfg
